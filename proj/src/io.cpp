#include "freespec/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include <fmt/format.h>

#include "freespec/error.hpp"

namespace freespec {

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

bool parse_number(std::string_view field, double& value) {
    if (field.empty()) return false;
    if (field.front() == '+') field.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    return ec == std::errc() && ptr == field.data() + field.size();
}

}  // namespace

MeasurementWindow parse_window_csv(const std::string& text) {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        double probe = 0.0;
        if (rows.empty() && labels.empty() && !parse_number(fields.front(), probe)) {
            for (auto f : fields) labels.emplace_back(f);
            continue;
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (std::size_t k = 0; k < fields.size(); ++k) {
            double v = 0.0;
            if (!parse_number(fields[k], v))
                throw InvalidArgument(fmt::format("line {}, field {}: '{}' is not a number",
                                                  line_no, k + 1, fields[k]));
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw InvalidArgument(fmt::format("line {} has {} fields, expected {}", line_no,
                                              row.size(), rows.front().size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InvalidArgument("CSV contains no data rows");
    Matrix data(Eigen::Index(rows.size()), Eigen::Index(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t t = 0; t < rows[i].size(); ++t)
            data(Eigen::Index(i), Eigen::Index(t)) = rows[i][t];
    return MeasurementWindow(std::move(data), std::move(labels));
}

MeasurementWindow read_window_csv(const std::filesystem::path& path) {
    return parse_window_csv(read_file(path));
}

std::string window_to_csv(const MeasurementWindow& window) {
    std::string out;
    const auto& labels = window.channel_labels();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (i) out += ',';
        out += labels[i];
    }
    if (!labels.empty()) out += '\n';
    const auto& x = window.data();
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index t = 0; t < x.cols(); ++t) {
            if (t) out += ',';
            out += format_double(x(i, t));
        }
        out += '\n';
    }
    return out;
}

std::string histogram_to_csv(const EsdHistogram& hist) {
    std::string out = "bin_left,bin_right,count,normalized_height\n";
    const auto heights = hist.normalized_heights();
    for (std::size_t i = 0; i < hist.counts.size(); ++i)
        out += fmt::format("{},{},{},{}\n", format_double(hist.bin_edges[i]),
                           format_double(hist.bin_edges[i + 1]), hist.counts[i],
                           format_double(heights[i]));
    return out;
}

std::string density_to_csv(const SpectralDensity& density) {
    std::string out = "x,rho,in_support\n";
    for (std::size_t i = 0; i < density.grid.size(); ++i)
        out += fmt::format("{},{},{}\n", format_double(density.grid[i]),
                           format_double(density.values[i]), density.values[i] > 0.0 ? 1 : 0);
    return out;
}

SpectralDensity parse_density_csv(const std::string& text) {
    SpectralDensity d;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::uint8_t> flags;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || trim(line).empty()) continue;
        const auto fields = split_fields(line);
        double x = 0.0, rho = 0.0, flag = 0.0;
        if (fields.size() != 3 || !parse_number(fields[0], x) || !parse_number(fields[1], rho) ||
            !parse_number(fields[2], flag))
            throw InvalidArgument(fmt::format("density CSV line {} is malformed", line_no));
        d.grid.push_back(x);
        d.values.push_back(rho);
        flags.push_back(flag != 0.0 ? 1 : 0);
    }
    if (d.grid.size() < 2) throw InvalidArgument("density CSV has fewer than 2 rows");
    for (std::size_t i = 0; i < flags.size();) {
        if (!flags[i]) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < flags.size() && flags[j + 1]) ++j;
        d.support_intervals.emplace_back(d.grid[i], d.grid[j]);
        i = j + 1;
    }
    d.valid.assign(d.grid.size(), 1);
    return d;
}

std::string spectrum_to_csv(const ProductSpectrum& spectrum) {
    std::string out = "re,im,is_outlier\n";
    for (std::size_t i = 0; i < spectrum.eigenvalues.size(); ++i)
        out += fmt::format("{},{},{}\n", format_double(spectrum.eigenvalues[i].real()),
                           format_double(spectrum.eigenvalues[i].imag()),
                           spectrum.is_outlier(i) ? 1 : 0);
    return out;
}

std::string series_to_csv(const std::vector<SeriesEntry>& series) {
    std::string out = "t_index,outlier_count,loc";
    const std::size_t n = series.empty() ? 0 : series.front().indicator.size();
    for (std::size_t i = 0; i < n; ++i) out += fmt::format(",L{}", i);
    out += '\n';
    for (const auto& e : series) {
        out += fmt::format("{},{},{}", e.t_index, e.outlier_count,
                           e.loc ? fmt::format("{}", *e.loc) : std::string());
        for (double l : e.indicator) out += ',' + format_double(l);
        out += '\n';
    }
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += fmt::format(".tmp.{}", ::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", tmp.string()));
        out << contents;
        out.flush();
        if (!out) throw std::runtime_error(fmt::format("write to '{}' failed", tmp.string()));
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace freespec
