#pragma once

#include <string>
#include <vector>

#include "sigf/interactions.hpp"

namespace sigf {

// Canonical dataset file: UTF-8 TSV with header `user<TAB>item<TAB>sign<TAB>split`,
// 0-based integer ids, sign in {0,1}, split in {train,val,test}.
void write_dataset(const std::string& path, const DatasetSplit& split);
DatasetSplit read_dataset(const std::string& path);

// Mapping files: TSV `original_key<TAB>index`, one row per entity.
void write_mapping(const std::string& path, const std::vector<std::string>& keys);
std::vector<std::string> read_mapping(const std::string& path);

// Raw interaction table (CSV or TSV) with user/item/signal columns.
struct RawTableSpec {
    std::string path;
    char delimiter = ',';
    int user_col = 0;
    int item_col = 1;
    int signal_col = 2;
    bool skip_header = false;
};
std::vector<RawRecord> read_raw_table(const RawTableSpec& spec);

}  // namespace sigf
