#include "afdm/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace afdm {

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string cfr_magnitude_csv(const CfrMatrix& cfr) {
    std::ostringstream os;
    os << "row,col,magnitude\n";
    for (Eigen::Index r = 0; r < cfr.entries.rows(); ++r)
        for (Eigen::Index c = 0; c < cfr.entries.cols(); ++c)
            os << r << ',' << c << ',' << g17(std::abs(cfr.entries(r, c))) << '\n';
    return os.str();
}

std::string paths_csv(const PathSet& paths, const WaveformParams& params) {
    std::ostringstream os;
    os << "path,h_re,h_im,tau_s,doppler_factor,l,q,loc_index,support_offset\n";
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const Path& p = paths[i];
        const int l = static_cast<int>(std::lround(p.delay_samples(params)));
        const int q = static_cast<int>(std::lround(p.normalized_dfs(params)));
        os << i << ',' << g17(p.h.real()) << ',' << g17(p.h.imag()) << ',' << g17(p.tau) << ',' << g17(p.a) << ','
           << l << ',' << q << ',' << loc_index(l, q, params) << ',' << cfr_support_offset(l, q, params) << '\n';
    }
    return os.str();
}

}  // namespace afdm
