#pragma once

#include <metamd/study.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace metamd {

struct Dataset {
    std::vector<std::string> ids;
    std::vector<StudySummary> studies;
};

/// CSV schema: study_id,n_t,mean_t,sd_t,n_c,mean_c,sd_c (header required,
/// comma delimiter, '.' decimal). SDs are squared to variances at ingestion.
/// Parse errors name the line and column.
Dataset read_dataset_csv(std::istream& in, const std::string& source_name = "<stream>");
Dataset read_dataset_file(const std::string& path);

}  // namespace metamd
