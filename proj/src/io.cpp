#include "alws/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace alws {

namespace {

constexpr char kMagic[4] = {'A', 'L', 'W', 'M'};

[[noreturn]] void io_fail(const std::string& path, const std::string& detail) {
    throw Error(ErrorCode::io_error, path + ": " + detail);
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line,
                             const std::string& detail) {
    std::ostringstream msg;
    msg << path << ":" << line << ": " << detail;
    throw Error(ErrorCode::parse_error, msg.str());
}

double parse_token(const std::string& path, std::size_t line,
                   const std::string& token) {
    const char* begin = token.c_str();
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(begin, &end);
    while (end && *end == ' ') ++end;
    if (end == begin || (end && *end != '\0')) {
        parse_fail(path, line, "malformed value '" + token + "'");
    }
    if (errno == ERANGE) {
        parse_fail(path, line, "value out of range '" + token + "'");
    }
    return value;
}

std::vector<std::vector<double>> read_csv_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) io_fail(path, "cannot open for reading");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            const std::string token =
                line.substr(start, comma == std::string::npos
                                       ? std::string::npos
                                       : comma - start);
            row.push_back(parse_token(path, lineno, token));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            std::ostringstream msg;
            msg << "row has " << row.size() << " values, expected "
                << rows.front().size();
            parse_fail(path, lineno, msg.str());
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) parse_fail(path, lineno, "no data rows");
    return rows;
}

void put_u64_le(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
}

std::uint64_t get_u64_le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    }
    return v;
}

void put_f64_le(std::string& out, double d) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, sizeof(bits));
    put_u64_le(out, bits);
}

double get_f64_le(const unsigned char* p) {
    const std::uint64_t bits = get_u64_le(p);
    double d;
    std::memcpy(&d, &bits, sizeof(d));
    return d;
}

std::string read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) io_fail(path, "cannot open for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Matrix from_rows(std::vector<std::vector<double>> rows) {
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index d = static_cast<Eigen::Index>(rows.front().size());
    Matrix m(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            m(i, j) = rows[static_cast<std::size_t>(i)]
                          [static_cast<std::size_t>(j)];
        }
    }
    return m;
}

Matrix read_matrix_binary_bytes(const std::string& path,
                                const std::string& bytes) {
    if (bytes.size() < 20 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        parse_fail(path, 0, "missing ALWM magic bytes");
    }
    const unsigned char* p =
        reinterpret_cast<const unsigned char*>(bytes.data());
    const std::uint64_t n = get_u64_le(p + 4);
    const std::uint64_t d = get_u64_le(p + 12);
    if (n < 1 || d < 1) parse_fail(path, 0, "empty matrix dimensions");
    const std::uint64_t expect = 20 + n * d * 8;
    if (bytes.size() != expect) {
        std::ostringstream msg;
        msg << "payload size " << bytes.size() << " != expected " << expect
            << " for " << n << "x" << d;
        parse_fail(path, 0, msg.str());
    }
    Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    const unsigned char* cursor = p + 20;
    for (std::uint64_t i = 0; i < n; ++i) {
        for (std::uint64_t j = 0; j < d; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                get_f64_le(cursor);
            cursor += 8;
        }
    }
    return m;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write_text(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) io_fail(tmp, "cannot open for writing");
        out.write(contents.data(),
                  static_cast<std::streamsize>(contents.size()));
        if (!out) io_fail(tmp, "write failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) io_fail(path, "rename failed: " + ec.message());
}

Matrix read_matrix(const std::string& path, MatrixFormat format) {
    if (format == MatrixFormat::csv) {
        return from_rows(read_csv_rows(path));
    }
    return read_matrix_binary_bytes(path, read_file_bytes(path));
}

Matrix read_matrix_auto(const std::string& path) {
    const std::string bytes = read_file_bytes(path);
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), kMagic, 4) == 0) {
        return read_matrix_binary_bytes(path, bytes);
    }
    return from_rows(read_csv_rows(path));
}

void write_matrix(const Matrix& m, const std::string& path,
                  MatrixFormat format) {
    std::string out;
    if (format == MatrixFormat::csv) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                if (j > 0) out.push_back(',');
                out += format_double(m(i, j));
            }
            out.push_back('\n');
        }
    } else {
        out.append(kMagic, 4);
        put_u64_le(out, static_cast<std::uint64_t>(m.rows()));
        put_u64_le(out, static_cast<std::uint64_t>(m.cols()));
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                put_f64_le(out, m(i, j));
            }
        }
    }
    atomic_write_text(path, out);
}

Vector read_vector(const std::string& path) {
    const Matrix m = read_matrix(path, MatrixFormat::csv);
    if (m.cols() != 1) {
        throw Error(ErrorCode::parse_error,
                    path + ": expected one value per line, got " +
                        std::to_string(m.cols()) + " columns");
    }
    return m.col(0);
}

void write_vector(const Vector& v, const std::string& path) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out += format_double(v(i));
        out.push_back('\n');
    }
    atomic_write_text(path, out);
}

}  // namespace alws
