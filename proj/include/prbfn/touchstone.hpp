#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "prbfn/pixel_network.hpp"

namespace prbfn {

enum class TouchstoneFormat { RI, MA, DB };
enum class TouchstoneParam { S, Z };

// Touchstone v1 network data. Matrices are stored in natural (row, column)
// indexing; Z data is kept in ohms (the file carries it normalized to the
// reference impedance, as the v1 specification requires).
struct TouchstoneData {
    int n_ports = 0;
    TouchstoneParam param = TouchstoneParam::S;
    TouchstoneFormat format = TouchstoneFormat::RI;
    std::string freq_unit = "GHz";  // Hz | kHz | MHz | GHz
    double z0 = 50.0;
    std::vector<double> freqs_hz;
    std::vector<Eigen::MatrixXcd> data;
};

// Parses Touchstone v1 text. Comment lines (!) are skipped. When
// n_ports_hint is 0 the port count is inferred (unique candidate for which
// the value count divides evenly and frequencies come out strictly
// increasing); pass the count from the .sNp extension when known. Errors:
// malformed option line, inconsistent value count, non-monotone frequency,
// ambiguous port count.
TouchstoneData parse_touchstone(const std::string& text, int n_ports_hint = 0);

// Canonical writer: generated comment header, one option line, 2-port data
// in the S11 S21 S12 S22 order required by the format, larger matrices
// row-major with each row starting a new line and at most four complex
// pairs per line.
std::string write_touchstone(const TouchstoneData& ts);

// First n_feed ports become feeding ports, the rest internal pixel ports.
PixelNetwork touchstone_to_network(const TouchstoneData& ts, int n_feed);
TouchstoneData network_to_touchstone(const PixelNetwork& net, TouchstoneParam param,
                                     TouchstoneFormat format, const std::string& freq_unit);

}  // namespace prbfn
