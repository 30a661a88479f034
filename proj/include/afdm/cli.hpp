// cli.hpp - command-line front end
//
//   afdm simulate --config run.json --out dir [--plot] [--workers N]
//   afdm cfr --waveform afdm --mode msml --out dir [--seed S] [--paths P] ...
//   afdm metrics {cop|mip|diversity|pep} --config run.json [--out file.csv]
//   afdm dict build --config run.json --out dir [--waveform W] [--n-p N]
//   afdm dict inspect --in dir
//
// Exit codes: 0 success, 2 usage or configuration error, 3 numerical or
// estimator failure, 4 I/O error or output collision.

#pragma once

#include <iosfwd>

namespace afdm::cli {

enum ExitCode { ok = 0, config_error = 2, runtime_error = 3, io_error = 4 };

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace afdm::cli
