#include "prbfn/touchstone.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace prbfn {

namespace {

constexpr double kPi = 3.14159265358979323846;

double unit_multiplier(const std::string& unit) {
    std::string u;
    for (char c : unit) u.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (u == "hz") return 1.0;
    if (u == "khz") return 1e3;
    if (u == "mhz") return 1e6;
    if (u == "ghz") return 1e9;
    throw std::invalid_argument("touchstone: unknown frequency unit '" + unit + "'");
}

std::string shortest(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::complex<double> decode_pair(TouchstoneFormat fmt, double a, double b) {
    switch (fmt) {
        case TouchstoneFormat::RI:
            return {a, b};
        case TouchstoneFormat::MA:
            return std::polar(a, b * kPi / 180.0);
        case TouchstoneFormat::DB:
            return std::polar(std::pow(10.0, a / 20.0), b * kPi / 180.0);
    }
    throw std::logic_error("touchstone: unreachable format");
}

std::pair<double, double> encode_pair(TouchstoneFormat fmt, std::complex<double> v) {
    switch (fmt) {
        case TouchstoneFormat::RI:
            return {v.real(), v.imag()};
        case TouchstoneFormat::MA:
            return {std::abs(v), std::arg(v) * 180.0 / kPi};
        case TouchstoneFormat::DB: {
            const double mag = std::abs(v);
            // -6000 dB stands in for an exact zero; it reparses far below
            // any tolerance of interest.
            const double db = (mag > 0.0) ? 20.0 * std::log10(mag) : -6000.0;
            return {db, std::arg(v) * 180.0 / kPi};
        }
    }
    throw std::logic_error("touchstone: unreachable format");
}

}  // namespace

TouchstoneData parse_touchstone(const std::string& text, int n_ports_hint) {
    TouchstoneData ts;
    bool have_options = false;
    std::vector<double> numbers;

    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        const auto bang = line.find('!');
        if (bang != std::string::npos) line.erase(bang);
        std::istringstream in(line);
        std::string first;
        if (!(in >> first)) continue;

        if (first == "#") {
            if (have_options) {
                throw std::invalid_argument("touchstone: multiple option lines");
            }
            have_options = true;
            // Tokens may appear in any order; defaults are GHz S MA R 50.
            ts.format = TouchstoneFormat::MA;
            std::string tok;
            while (in >> tok) {
                std::string low;
                for (char c : tok)
                    low.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
                if (low == "hz" || low == "khz" || low == "mhz" || low == "ghz") {
                    ts.freq_unit = tok;
                } else if (low == "s") {
                    ts.param = TouchstoneParam::S;
                } else if (low == "z") {
                    ts.param = TouchstoneParam::Z;
                } else if (low == "y" || low == "g" || low == "h") {
                    throw std::invalid_argument("touchstone: unsupported parameter type '" + tok +
                                                "'");
                } else if (low == "ri") {
                    ts.format = TouchstoneFormat::RI;
                } else if (low == "ma") {
                    ts.format = TouchstoneFormat::MA;
                } else if (low == "db") {
                    ts.format = TouchstoneFormat::DB;
                } else if (low == "r") {
                    if (!(in >> ts.z0)) {
                        throw std::invalid_argument("touchstone: option 'R' without impedance");
                    }
                } else {
                    throw std::invalid_argument("touchstone: malformed option line token '" + tok +
                                                "'");
                }
            }
            continue;
        }

        // Data line: a stream of numbers; layout across lines is free-form.
        std::istringstream data(line);
        double v;
        while (data >> v) numbers.push_back(v);
        if (!data.eof()) {
            throw std::invalid_argument("touchstone: non-numeric data in line '" + line + "'");
        }
    }

    if (!have_options) {
        throw std::invalid_argument("touchstone: missing option line");
    }
    if (numbers.empty()) {
        throw std::invalid_argument("touchstone: no data");
    }

    // A block is 1 + 2*n^2 values and frequencies are strictly increasing.
    auto block_size = [](int n) {
        return 1 + 2 * static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
    };
    auto consistent = [&](int n) {
        const std::size_t block = block_size(n);
        if (numbers.size() % block != 0) return false;
        double prev = -1.0;
        for (std::size_t f = 0; f * block < numbers.size(); ++f) {
            const double freq = numbers[f * block];
            if (!(freq > prev)) return false;
            prev = freq;
        }
        return true;
    };

    int n_ports = 0;
    if (n_ports_hint > 0) {
        if (numbers.size() % block_size(n_ports_hint) != 0) {
            throw std::invalid_argument("touchstone: inconsistent value count " +
                                        std::to_string(numbers.size()) + " for " +
                                        std::to_string(n_ports_hint) + " ports");
        }
        n_ports = n_ports_hint;
    } else {
        std::vector<int> candidates;
        for (int n = 1; n <= 64; ++n) {
            if (consistent(n)) candidates.push_back(n);
        }
        if (candidates.empty()) {
            throw std::invalid_argument("touchstone: inconsistent value count " +
                                        std::to_string(numbers.size()));
        }
        if (candidates.size() > 1) {
            throw std::invalid_argument(
                "touchstone: ambiguous port count, pass it explicitly (candidates " +
                std::to_string(candidates.front()) + " and " + std::to_string(candidates[1]) + ")");
        }
        n_ports = candidates.front();
    }
    ts.n_ports = n_ports;

    const double mult = unit_multiplier(ts.freq_unit);
    const std::size_t block = 1 + 2 * static_cast<std::size_t>(n_ports) * n_ports;
    const std::size_t n_freq = numbers.size() / block;
    ts.freqs_hz.reserve(n_freq);
    ts.data.reserve(n_freq);
    for (std::size_t f = 0; f < n_freq; ++f) {
        const double* p = numbers.data() + f * block;
        const double freq = p[0] * mult;
        if (!ts.freqs_hz.empty() && !(freq > ts.freqs_hz.back())) {
            throw std::invalid_argument("touchstone: non-monotone frequency at " +
                                        std::to_string(freq) + " Hz");
        }
        ts.freqs_hz.push_back(freq);
        Eigen::MatrixXcd M(n_ports, n_ports);
        for (int i = 0; i < n_ports; ++i) {
            for (int j = 0; j < n_ports; ++j) {
                // 2-port files store S11 S21 S12 S22 (column-major); every
                // other size is row-major.
                const int idx = (n_ports == 2) ? (j * 2 + i) : (i * n_ports + j);
                M(i, j) = decode_pair(ts.format, p[1 + 2 * idx], p[2 + 2 * idx]);
            }
        }
        if (ts.param == TouchstoneParam::Z) M *= ts.z0;  // v1 stores normalized impedance
        ts.data.push_back(std::move(M));
    }
    return ts;
}

std::string write_touchstone(const TouchstoneData& ts) {
    if (ts.n_ports < 1) throw std::invalid_argument("write_touchstone: n_ports must be >= 1");
    if (ts.freqs_hz.size() != ts.data.size() || ts.data.empty()) {
        throw std::invalid_argument("write_touchstone: one matrix per frequency required");
    }
    const double mult = unit_multiplier(ts.freq_unit);

    std::string out;
    out += "! " + std::to_string(ts.n_ports) + "-port " +
           (ts.param == TouchstoneParam::Z ? std::string("Z") : std::string("S")) +
           "-parameter file\n";
    out += "! " + std::to_string(ts.freqs_hz.size()) + " frequency points\n";
    out += "# " + ts.freq_unit + (ts.param == TouchstoneParam::Z ? " Z " : " S ");
    switch (ts.format) {
        case TouchstoneFormat::RI: out += "RI"; break;
        case TouchstoneFormat::MA: out += "MA"; break;
        case TouchstoneFormat::DB: out += "DB"; break;
    }
    out += " R " + shortest(ts.z0) + "\n";

    const int n = ts.n_ports;
    for (std::size_t f = 0; f < ts.freqs_hz.size(); ++f) {
        Eigen::MatrixXcd M = ts.data[f];
        if (ts.param == TouchstoneParam::Z) M /= ts.z0;
        if (M.rows() != n || M.cols() != n) {
            throw std::invalid_argument("write_touchstone: matrix size mismatch at point " +
                                        std::to_string(f));
        }
        std::vector<std::complex<double>> seq;
        seq.reserve(static_cast<std::size_t>(n) * n);
        if (n == 2) {
            seq = {M(0, 0), M(1, 0), M(0, 1), M(1, 1)};
        } else {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) seq.push_back(M(i, j));
        }

        out += shortest(ts.freqs_hz[f] / mult);
        int on_line = 0;
        for (std::size_t k = 0; k < seq.size(); ++k) {
            const bool row_break = n > 2 && k > 0 && k % static_cast<std::size_t>(n) == 0;
            if (row_break || on_line == 4) {
                out += "\n";
                on_line = 0;
            }
            const auto [a, b] = encode_pair(ts.format, seq[k]);
            out += " " + shortest(a) + " " + shortest(b);
            ++on_line;
        }
        out += "\n";
    }
    return out;
}

PixelNetwork touchstone_to_network(const TouchstoneData& ts, int n_feed) {
    if (n_feed < 1 || n_feed > ts.n_ports) {
        throw std::invalid_argument("touchstone_to_network: n_feed out of range");
    }
    PixelNetwork net;
    net.n_feed = n_feed;
    net.q = ts.n_ports - n_feed;
    net.z0 = ts.z0;
    net.freqs_hz = ts.freqs_hz;
    net.z.reserve(ts.data.size());
    for (const auto& M : ts.data) {
        net.z.push_back(ts.param == TouchstoneParam::Z ? M : s_to_z(M, ts.z0));
    }
    net.reciprocal = is_reciprocal(net);
    net.validate();
    return net;
}

TouchstoneData network_to_touchstone(const PixelNetwork& net, TouchstoneParam param,
                                     TouchstoneFormat format, const std::string& freq_unit) {
    unit_multiplier(freq_unit);  // validates
    TouchstoneData ts;
    ts.n_ports = net.n_ports();
    ts.param = param;
    ts.format = format;
    ts.freq_unit = freq_unit;
    ts.z0 = net.z0;
    ts.freqs_hz = net.freqs_hz;
    ts.data.reserve(net.z.size());
    for (const auto& Z : net.z) {
        ts.data.push_back(param == TouchstoneParam::Z ? Z : z_to_s(Z, net.z0));
    }
    return ts;
}

}  // namespace prbfn
