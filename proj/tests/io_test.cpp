#include <filesystem>

#include <gtest/gtest.h>

#include "freespec/error.hpp"
#include "freespec/io.hpp"

using namespace freespec;
namespace fs = std::filesystem;

TEST(WindowCsv, RoundTripIsExact) {
    const auto w = sample_gaussian_matrix(4, 7, 3);
    const auto back = parse_window_csv(window_to_csv(w));
    EXPECT_EQ(back.data(), w.data());
    EXPECT_EQ(window_to_csv(back), window_to_csv(w));
}

TEST(WindowCsv, HeaderIsChannelLabels) {
    const auto w = parse_window_csv("bus1,bus2\n1,2,3\n4,5,6\n");
    ASSERT_EQ(w.channel_labels().size(), 2u);
    EXPECT_EQ(w.channel_labels()[1], "bus2");
    EXPECT_EQ(w.data()(1, 2), 6.0);
    EXPECT_EQ(window_to_csv(w), "bus1,bus2\n1,2,3\n4,5,6\n");
}

TEST(WindowCsv, Malformed) {
    EXPECT_THROW(parse_window_csv(""), InvalidArgument);
    EXPECT_THROW(parse_window_csv("1,2\n3\n"), InvalidArgument);
    EXPECT_THROW(parse_window_csv("1,2\n3,x\n"), InvalidArgument);
}

TEST(DensityCsv, RoundTripSupport) {
    SpectralDensity d;
    d.grid = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
    d.values = {0.0, 0.5, 0.25, 0.0, 0.1, 0.0};
    d.valid.assign(6, 1);
    const auto text = density_to_csv(d);
    EXPECT_EQ(text.substr(0, text.find('\n')), "x,rho,in_support");
    const auto back = parse_density_csv(text);
    EXPECT_EQ(back.values, d.values);
    ASSERT_EQ(back.support_intervals.size(), 2u);
    EXPECT_EQ(back.support_intervals[0], (std::pair{1.0, 2.0}));
    EXPECT_EQ(back.support_intervals[1], (std::pair{4.0, 4.0}));
}

TEST(Csv, Headers) {
    const auto h = histogram({0.0, 1.0, 2.0, 3.0}, 2);
    EXPECT_EQ(histogram_to_csv(h), "bin_left,bin_right,count,normalized_height\n0,1.5,2,0.33333333333333331\n"
                                   "1.5,3,2,0.33333333333333331\n");
    ProductSpectrum s;
    s.eigenvalues = {{2.0, 0.0}, {0.5, -0.5}};
    s.outlier_indices = {0};
    EXPECT_EQ(spectrum_to_csv(s), "re,im,is_outlier\n2,0,1\n0.5,-0.5,0\n");
    SeriesEntry e;
    e.t_index = 9;
    e.indicator = {0.0, 0.0};
    EXPECT_EQ(series_to_csv({e}), "t_index,outlier_count,loc,L0,L1\n9,0,,0,0\n");
}

TEST(Files, AtomicWriteAndRead) {
    const fs::path p = fs::temp_directory_path() / "freespec_io_test.txt";
    write_file_atomic(p, "abc\n");
    EXPECT_EQ(read_file(p), "abc\n");
    write_file_atomic(p, "xyz");
    EXPECT_EQ(read_file(p), "xyz");
    fs::remove(p);
    EXPECT_THROW(read_file(p), std::runtime_error);
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}
