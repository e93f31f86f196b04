#include "sigf/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "sigf/errors.hpp"

namespace sigf {

namespace {

std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t at = line.find(delim, start);
        if (at == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, at - start));
        start = at + 1;
    }
    return fields;
}

std::int32_t parse_i32(const std::string& s, const char* what) {
    std::int32_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw data_error(std::string("malformed ") + what + " field '" + s + "'");
    return v;
}

void append_rows(std::ofstream& out, const std::vector<Interaction>& rows, const char* tag) {
    for (const Interaction& it : rows)
        out << it.user << '\t' << it.item << '\t' << int(it.sign) << '\t' << tag << '\n';
}

}  // namespace

void write_dataset(const std::string& path, const DatasetSplit& split) {
    std::ofstream out(path, std::ios::binary);  // binary: stable line endings
    if (!out) throw data_error("cannot open '" + path + "' for writing");
    out << "user\titem\tsign\tsplit\n";
    append_rows(out, split.train, "train");
    append_rows(out, split.validation, "val");
    append_rows(out, split.test, "test");
    if (!out) throw data_error("failed writing '" + path + "'");
}

DatasetSplit read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open dataset '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != "user\titem\tsign\tsplit")
        throw data_error("dataset '" + path + "' missing canonical header");

    DatasetSplit split;
    std::int32_t max_user = -1, max_item = -1;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_fields(line, '\t');
        if (fields.size() != 4) throw data_error("dataset row with wrong field count");
        Interaction it;
        it.user = parse_i32(fields[0], "user");
        it.item = parse_i32(fields[1], "item");
        const std::int32_t sign = parse_i32(fields[2], "sign");
        if (sign != 0 && sign != 1) throw data_error("sign outside {0,1}");
        it.sign = static_cast<std::int8_t>(sign);
        max_user = std::max(max_user, it.user);
        max_item = std::max(max_item, it.item);
        if (fields[3] == "train") split.train.push_back(it);
        else if (fields[3] == "val") split.validation.push_back(it);
        else if (fields[3] == "test") split.test.push_back(it);
        else throw data_error("unknown split tag '" + fields[3] + "'");
    }
    if (split.train.empty()) throw data_error("dataset '" + path + "' has no train rows");
    split.n = max_user + 1;
    split.m = max_item + 1;
    return split;
}

void write_mapping(const std::string& path, const std::vector<std::string>& keys) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot open '" + path + "' for writing");
    for (std::size_t i = 0; i < keys.size(); ++i) out << keys[i] << '\t' << i << '\n';
    if (!out) throw data_error("failed writing '" + path + "'");
}

std::vector<std::string> read_mapping(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open mapping '" + path + "'");
    std::vector<std::string> keys;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::size_t tab = line.rfind('\t');
        if (tab == std::string::npos) throw data_error("malformed mapping row");
        if (parse_i32(line.substr(tab + 1), "index") != static_cast<std::int32_t>(keys.size()))
            throw data_error("mapping indices out of order");
        keys.push_back(line.substr(0, tab));
    }
    return keys;
}

std::vector<RawRecord> read_raw_table(const RawTableSpec& spec) {
    std::ifstream in(spec.path, std::ios::binary);
    if (!in) throw data_error("cannot open raw file '" + spec.path + "'");
    const int need = std::max({spec.user_col, spec.item_col, spec.signal_col});
    std::vector<RawRecord> records;
    std::string line;
    bool first = true;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first && spec.skip_header) { first = false; continue; }
        first = false;
        if (line.empty()) continue;
        const auto fields = split_fields(line, spec.delimiter);
        if (static_cast<int>(fields.size()) <= need)
            throw data_error("row " + std::to_string(lineno) + " of '" + spec.path +
                             "' has too few columns");
        RawRecord rec;
        rec.user_key = fields[static_cast<std::size_t>(spec.user_col)];
        rec.item_key = fields[static_cast<std::size_t>(spec.item_col)];
        try {
            rec.signal = std::stod(fields[static_cast<std::size_t>(spec.signal_col)]);
        } catch (const std::exception&) {
            throw data_error("row " + std::to_string(lineno) + " of '" + spec.path +
                             "' has a non-numeric signal");
        }
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace sigf
