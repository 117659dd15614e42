#pragma once

// Text formats. Numbers are written with 17 significant digits so every
// double round-trips exactly.

#include <filesystem>
#include <string>
#include <vector>

#include "freespec/freeprob.hpp"
#include "freespec/locate.hpp"
#include "freespec/products.hpp"
#include "freespec/randmat.hpp"

namespace freespec {

std::string format_double(double v);

/// N rows (channels) x T comma-separated columns. If the first field of
/// the first line is not a number, that line is a header of N channel
/// labels.
MeasurementWindow parse_window_csv(const std::string& text);
MeasurementWindow read_window_csv(const std::filesystem::path& path);
std::string window_to_csv(const MeasurementWindow& window);

/// bin_left,bin_right,count,normalized_height
std::string histogram_to_csv(const EsdHistogram& hist);
/// x,rho,in_support
std::string density_to_csv(const SpectralDensity& density);
/// Inverse of density_to_csv; support intervals are rebuilt from the
/// in_support runs. The smoothing offset is not stored and reads back as 0.
SpectralDensity parse_density_csv(const std::string& text);
/// re,im,is_outlier
std::string spectrum_to_csv(const ProductSpectrum& spectrum);
/// t_index,outlier_count,loc,L0,...,L{N-1}; loc is empty without outliers
std::string series_to_csv(const std::vector<SeriesEntry>& series);

std::string read_file(const std::filesystem::path& path);
/// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace freespec
