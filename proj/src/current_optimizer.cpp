#include "prbfn/current_optimizer.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "prbfn/rng.hpp"

namespace prbfn {

namespace {

void check_dims(const BeamMatrix& B, const CorrelationMatrix& C_obj, const char* where) {
    if (C_obj.rows() != C_obj.cols()) {
        throw std::invalid_argument(std::string(where) + ": correlation matrix must be square");
    }
    if (B.cols() != C_obj.rows()) {
        throw std::invalid_argument(std::string(where) + ": B has " + std::to_string(B.cols()) +
                                    " columns but target is " + std::to_string(C_obj.rows()) + "x" +
                                    std::to_string(C_obj.cols()));
    }
}

Eigen::MatrixXcd random_start(int n_a, int n, std::mt19937_64& rng) {
    Eigen::MatrixXcd B(n_a, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n_a; ++i) {
            const double re = uniform_range(rng, -1.0, 1.0);
            const double im = uniform_range(rng, -1.0, 1.0);
            B(i, j) = {re, im};
        }
    }
    return B;
}

}  // namespace

double objective(const BeamMatrix& B, const CorrelationMatrix& C_obj) {
    check_dims(B, C_obj, "objective");
    const Eigen::MatrixXcd G = B.adjoint() * B;
    return (G.cwiseAbs() - C_obj).squaredNorm();
}

Eigen::MatrixXcd gradient(const BeamMatrix& B, const CorrelationMatrix& C_obj) {
    check_dims(B, C_obj, "gradient");
    const Eigen::MatrixXcd G = B.adjoint() * B;
    const Eigen::Index n = G.rows();
    Eigen::MatrixXcd weighted(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double mag = std::abs(G(i, j));
            weighted(i, j) = (mag < kSgnGuard)
                                 ? std::complex<double>(0.0, 0.0)
                                 : (mag - C_obj(i, j)) * (G(i, j) / mag);
        }
    }
    return 2.0 * B * weighted;
}

BeamMatrix project_columns(const Eigen::MatrixXcd& B, std::mt19937_64& rng) {
    BeamMatrix P = B;
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
        const double norm = P.col(j).norm();
        if (norm != 0.0) {
            P.col(j) /= norm;
        } else {
            Eigen::VectorXcd v(P.rows());
            for (Eigen::Index i = 0; i < P.rows(); ++i) {
                v(i) = {uniform_range(rng, -1.0, 1.0), uniform_range(rng, -1.0, 1.0)};
            }
            const double vn = v.norm();
            P.col(j) = (vn != 0.0) ? (v / vn).eval() : Eigen::VectorXcd::Unit(P.rows(), 0);
        }
    }
    return P;
}

double phase_spread(const BeamMatrix& B) {
    if (B.rows() <= 1 || B.cols() == 0) return 0.0;
    double total = 0.0;
    for (Eigen::Index j = 0; j < B.cols(); ++j) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        const std::complex<double> ref = B(0, j);
        for (Eigen::Index i = 0; i < B.rows(); ++i) {
            const std::complex<double> w = B(i, j) * std::conj(ref);
            const double ang = (w == std::complex<double>(0.0, 0.0)) ? 0.0 : std::arg(w);
            lo = std::min(lo, ang);
            hi = std::max(hi, ang);
        }
        total += hi - lo;
    }
    return total / static_cast<double>(B.cols());
}

double relative_error(const Eigen::MatrixXd& C, const CorrelationMatrix& C_obj) {
    if (C.rows() != C_obj.rows() || C.cols() != C_obj.cols()) {
        throw std::invalid_argument("relative_error: dimension mismatch");
    }
    const double denom = (Eigen::MatrixXd::Ones(C_obj.rows(), C_obj.cols()) - C_obj).squaredNorm();
    if (denom == 0.0) {
        throw std::invalid_argument("relative_error: target is the all-one matrix");
    }
    return (C - C_obj).squaredNorm() / denom;
}

double absolute_f_threshold(const CorrelationMatrix& C_obj, double eps0) {
    if (!(eps0 > 0.0)) {
        throw std::invalid_argument("absolute_f_threshold: eps0 must be > 0");
    }
    const double denom = (Eigen::MatrixXd::Ones(C_obj.rows(), C_obj.cols()) - C_obj).squaredNorm();
    if (denom == 0.0) {
        throw std::invalid_argument("absolute_f_threshold: target is the all-one matrix");
    }
    return eps0 * denom;
}

SolveReport pgd_solve(const CorrelationMatrix& C_obj, int n_a, const PgdOptions& opts,
                      const std::optional<BeamMatrix>& B0) {
    if (n_a < 1) throw std::invalid_argument("pgd_solve: n_a must be >= 1");
    if (!(opts.eta > 0.0) || !(opts.eps_stop > 0.0) || opts.max_iter < 1) {
        throw std::invalid_argument("pgd_solve: options must be positive");
    }
    const int n = static_cast<int>(C_obj.rows());
    std::mt19937_64 rng(opts.seed);

    SolveReport rep;

    // With a single output port every feasible column is a unit scalar, so
    // |B^H B| is the all-one matrix and f is constant over the feasible set;
    // the all-one matrix is the canonical minimizer.
    if (n_a == 1) {
        rep.best = BeamMatrix::Ones(1, n);
        rep.objective = objective(rep.best, C_obj);
        rep.epsilon = relative_error((rep.best.adjoint() * rep.best).cwiseAbs(), C_obj);
        rep.iterations = 0;
        rep.converged = rep.objective < opts.eps_stop;
        rep.phase_spread = 0.0;
        return rep;
    }

    BeamMatrix B = B0 ? project_columns(*B0, rng) : project_columns(random_start(n_a, n, rng), rng);
    double f = objective(B, C_obj);
    int iter = 0;
    bool converged = f < opts.eps_stop;
    while (!converged && iter < opts.max_iter) {
        const Eigen::MatrixXcd g = gradient(B, C_obj);
        B = project_columns(B - opts.eta * g, rng);
        f = objective(B, C_obj);
        ++iter;
        converged = f < opts.eps_stop;
    }

    rep.best = std::move(B);
    rep.objective = f;
    rep.epsilon = relative_error((rep.best.adjoint() * rep.best).cwiseAbs(), C_obj);
    rep.iterations = iter;
    rep.converged = converged;
    rep.phase_spread = phase_spread(rep.best);
    return rep;
}

SolveReport multi_restart(const CorrelationMatrix& C_obj, int n_a, const PgdOptions& opts) {
    if (opts.restarts < 1) {
        throw std::invalid_argument("multi_restart: restarts must be >= 1");
    }
    SolveReport best;
    double best_spread = std::numeric_limits<double>::infinity();
    bool have_converged = false;
    bool first = true;
    std::vector<RestartResult> per_restart;
    per_restart.reserve(static_cast<std::size_t>(opts.restarts));

    for (int r = 0; r < opts.restarts; ++r) {
        PgdOptions sub = opts;
        sub.seed = derive_seed(opts.seed, static_cast<std::uint64_t>(r));
        SolveReport rep = pgd_solve(C_obj, n_a, sub);
        per_restart.push_back({rep.objective, rep.iterations});

        bool take = false;
        if (rep.converged) {
            take = !have_converged || rep.phase_spread < best_spread;
            have_converged = true;
        } else if (!have_converged) {
            take = first || rep.objective < best.objective;
        }
        if (take) {
            best_spread = rep.phase_spread;
            best = std::move(rep);
        }
        first = false;
    }
    best.per_restart = std::move(per_restart);
    return best;
}

std::vector<std::pair<int, double>> na_sweep(double W, int N, const std::vector<int>& na_range,
                                             const PgdOptions& opts) {
    if (na_range.empty()) {
        throw std::invalid_argument("na_sweep: na_range must be nonempty");
    }
    const CorrelationMatrix C_obj = make_target_correlation(make_fas_params(W, N));
    std::vector<std::pair<int, double>> out;
    out.reserve(na_range.size());
    for (int n_a : na_range) {
        const SolveReport rep = multi_restart(C_obj, n_a, opts);
        out.emplace_back(n_a, rep.epsilon);
    }
    return out;
}

}  // namespace prbfn
