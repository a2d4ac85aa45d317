#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rkhslab/kernel.hpp"

namespace rkhslab::csv {

// Function files carry the header `point,value_re,value_im` and one row per
// grid node. Matrix files carry one header row naming the columns, then one
// row per matrix row: `c0,c1,...` in real mode, or
// `c0_re,c0_im,c1_re,c1_im,...` in complex mode. The mode is read back from
// the header. Numbers are written in shortest round-trip form.

enum class MatrixMode { real, complex };

struct Sample {
  double point;
  cplx value;
};

std::string format_double(double x);

std::vector<Sample> read_samples(const std::filesystem::path& path);
void write_samples(const std::filesystem::path& path, const Grid& grid,
                   const DiscreteFunction& f);

/// Reads samples and checks them row-for-row against the grid nodes.
/// Throws grid_mismatch on a count or coordinate mismatch.
DiscreteFunction read_function(const std::filesystem::path& path, const Grid& grid);

CMatrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const CMatrix& m,
                  MatrixMode mode);

inline void write_kernel(const std::filesystem::path& path,
                         const KernelMatrix& kernel) {
  write_matrix(path, kernel.gram(),
               kernel.is_real() ? MatrixMode::real : MatrixMode::complex);
}

}  // namespace rkhslab::csv
