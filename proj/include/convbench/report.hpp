#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace convbench {

/// Aligned-column text table that also serializes to JSON rows.
struct Table {
    std::string title;
    std::vector<std::string> headers;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }

    std::string to_text() const {
        std::vector<std::size_t> width(headers.size(), 0);
        for (std::size_t c = 0; c < headers.size(); ++c) width[c] = headers[c].size();
        for (const auto& r : rows)
            for (std::size_t c = 0; c < r.size() && c < width.size(); ++c) width[c] = std::max(width[c], r[c].size());
        auto line = [&](const std::vector<std::string>& cells) {
            std::string out;
            for (std::size_t c = 0; c < width.size(); ++c) {
                std::string cell = c < cells.size() ? cells[c] : "";
                if (c) out += "  ";
                if (c == 0) out += cell + std::string(width[c] - cell.size(), ' ');
                else out += std::string(width[c] - cell.size(), ' ') + cell;
            }
            while (!out.empty() && out.back() == ' ') out.pop_back();
            return out + '\n';
        };
        std::string out;
        if (!title.empty()) out += title + '\n';
        out += line(headers);
        std::size_t total = 0;
        for (auto w : width) total += w;
        out += std::string(total + 2 * (width.empty() ? 0 : width.size() - 1), '-') + '\n';
        for (const auto& r : rows) out += line(r);
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : rows) {
            nlohmann::json o = nlohmann::json::object();
            for (std::size_t c = 0; c < headers.size() && c < r.size(); ++c) o[headers[c]] = r[c];
            arr.push_back(std::move(o));
        }
        return {{"title", title}, {"rows", arr}};
    }
};

inline std::string fixed(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline std::string percent(double fraction, int digits = 1) { return fixed(100.0 * fraction, digits) + "%"; }

}  // namespace convbench
