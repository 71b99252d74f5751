#include <fstream>
#include <sstream>

#include "csv_util.hpp"
#include "distsel/dataset.hpp"
#include "distsel/error.hpp"

namespace distsel {

namespace {

std::string cell_name(std::size_t row, std::size_t col) {
    return "row " + std::to_string(row) + ", column " + std::to_string(col);
}

} // namespace

CsvData parse_csv(std::istream& in, bool has_header, std::optional<ColumnRef> label_column) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    std::size_t width = 0;

    if (has_header) {
        while (std::getline(in, line)) {
            ++line_no;
            if (!detail::is_blank(line)) {
                for (auto f : detail::split_fields(line)) {
                    header.emplace_back(f);
                }
                width = header.size();
                break;
            }
        }
        if (header.empty()) {
            throw ParseError("empty CSV file", 0, 0);
        }
    }

    std::optional<std::size_t> label_idx;
    if (label_column) {
        if (const auto* idx = std::get_if<std::size_t>(&*label_column)) {
            label_idx = *idx;
        } else {
            const auto& name = std::get<std::string>(*label_column);
            for (std::size_t j = 0; j < header.size(); ++j) {
                if (header[j] == name) {
                    label_idx = j;
                }
            }
            if (!label_idx) {
                throw ParseError("label column '" + name + "' not found in header", line_no, 0);
            }
        }
    }

    std::vector<double> values;
    std::vector<int> labels;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::is_blank(line)) {
            continue;
        }
        const auto fields = detail::split_fields(line);
        if (width == 0) {
            width = fields.size();
        }
        if (fields.size() != width) {
            throw ParseError("ragged row: expected " + std::to_string(width) + " fields, got " +
                                 std::to_string(fields.size()) + " at line " + std::to_string(line_no),
                             line_no, 0);
        }
        if (label_idx && *label_idx >= width) {
            throw ParseError("label column index out of range", line_no, *label_idx + 1);
        }
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const auto v = detail::parse_real(fields[j]);
            if (!v) {
                throw ParseError("cannot parse '" + std::string(fields[j]) + "' as a finite real at " +
                                     cell_name(line_no, j + 1),
                                 line_no, j + 1);
            }
            if (label_idx && j == *label_idx) {
                if (*v != std::floor(*v)) {
                    throw ParseError("label is not an integer at " + cell_name(line_no, j + 1), line_no, j + 1);
                }
                labels.push_back(static_cast<int>(*v));
            } else {
                values.push_back(*v);
            }
        }
        ++rows;
    }
    if (rows == 0) {
        throw ParseError("empty CSV file", line_no, 0);
    }

    const std::size_t cols = width - (label_idx ? 1 : 0);
    std::vector<std::string> names;
    if (!header.empty()) {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (!label_idx || j != *label_idx) {
                names.push_back(header[j]);
            }
        }
    }
    CsvData out{DataMatrix(rows, cols, std::move(values), std::move(names)), std::nullopt};
    if (label_idx) {
        out.labels = LabelVector(std::move(labels));
    }
    return out;
}

CsvData load_csv(const std::filesystem::path& path, bool has_header, std::optional<ColumnRef> label_column) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    return parse_csv(in, has_header, std::move(label_column));
}

void write_csv(std::ostream& out, const DataMatrix& data, const LabelVector* labels) {
    const auto& names = data.feature_names();
    for (std::size_t j = 0; j < names.size(); ++j) {
        out << (j ? "," : "") << names[j];
    }
    if (labels) {
        out << ",label";
    }
    out << '\n';
    out.precision(17);
    for (std::size_t i = 0; i < data.rows(); ++i) {
        for (std::size_t j = 0; j < data.cols(); ++j) {
            out << (j ? "," : "") << data(i, j);
        }
        if (labels) {
            out << ',' << (*labels)[i];
        }
        out << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const DataMatrix& data, const LabelVector* labels) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    write_csv(out, data, labels);
}

LabelVector load_labels(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::string line;
    std::size_t line_no = 0;
    std::vector<int> raw;
    while (std::getline(in, line)) {
        ++line_no;
        const auto field = detail::trim(line);
        if (field.empty()) {
            continue;
        }
        const auto v = detail::parse_real(field);
        if (!v || *v != std::floor(*v)) {
            // A non-numeric first line is treated as a header.
            if (raw.empty() && line_no == 1) {
                continue;
            }
            throw ParseError("invalid label '" + std::string(field) + "' at line " + std::to_string(line_no),
                             line_no, 1);
        }
        raw.push_back(static_cast<int>(*v));
    }
    if (raw.empty()) {
        throw ParseError("empty label file", line_no, 0);
    }
    try {
        return LabelVector(raw);
    } catch (const InvalidArgument&) {
        return LabelVector::normalized(raw);
    }
}

void write_labels(const std::filesystem::path& path, const LabelVector& labels) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    for (int l : labels.labels()) {
        out << l << '\n';
    }
}

} // namespace distsel
