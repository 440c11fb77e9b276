#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

namespace wrac {

/// Aligned-column plain-text table, left-aligned first column and
/// right-aligned numeric columns, matching the published table layouts.
class TextTable {
public:
    explicit TextTable(std::vector<std::string> headers) : headers_(std::move(headers)) {}

    void add_row(std::vector<std::string> cells) {
        cells.resize(headers_.size());
        rows_.push_back(std::move(cells));
    }

    std::string render() const {
        std::vector<std::size_t> widths(headers_.size());
        for (std::size_t c = 0; c < headers_.size(); ++c) widths[c] = headers_[c].size();
        for (const auto& row : rows_) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                widths[c] = std::max(widths[c], row[c].size());
            }
        }
        std::string out;
        auto emit = [&](const std::vector<std::string>& row) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                const std::string& cell = row[c];
                if (c == 0) {
                    out += cell + std::string(widths[c] - cell.size(), ' ');
                } else {
                    out += std::string(widths[c] - cell.size(), ' ') + cell;
                }
                out += (c + 1 < row.size()) ? "  " : "";
            }
            out += "\n";
        };
        emit(headers_);
        std::size_t total = 0;
        for (std::size_t w : widths) total += w + 2;
        out += std::string(total > 2 ? total - 2 : total, '-') + "\n";
        for (const auto& row : rows_) emit(row);
        return out;
    }

private:
    std::vector<std::string> headers_;
    std::vector<std::vector<std::string>> rows_;
};

/// 1234567 -> "1,234,567"
inline std::string format_thousands(long value) {
    std::string digits = std::to_string(value < 0 ? -value : value);
    std::string out;
    int pos = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it, ++pos) {
        if (pos > 0 && pos % 3 == 0) out += ',';
        out += *it;
    }
    if (value < 0) out += '-';
    return {out.rbegin(), out.rend()};
}

inline std::string format_fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
    return buf;
}

/// Signed percent with two decimals; non-finite values render as "--".
inline std::string format_percent(double value) {
    if (!std::isfinite(value)) return "--";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%+.2f%%", value);
    return buf;
}

inline std::string format_money(double dollars) {
    return format_fixed(dollars, 2);
}

}  // namespace wrac
