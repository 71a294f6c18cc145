#pragma once

#include <filesystem>
#include <string>

namespace dq::testing {

inline std::filesystem::path fixtures_dir() { return std::filesystem::path(FIXTURES_DIR); }
inline std::filesystem::path hospital_dqx() { return fixtures_dir() / "hospital/hospital.dqx"; }
inline std::filesystem::path hospital_data() { return fixtures_dir() / "hospital/data"; }
inline std::filesystem::path hospital_query() { return fixtures_dir() / "hospital/query_sep5.dl"; }
inline std::filesystem::path appendix_dqx() { return fixtures_dir() / "appendix/appendix.dqx"; }
inline std::filesystem::path appendix_data() { return fixtures_dir() / "appendix/data"; }
inline std::filesystem::path appendix_query() { return fixtures_dir() / "appendix/query_sep5.dl"; }
inline std::filesystem::path mnt_tables() { return fixtures_dir() / "mnt_tables"; }

}  // namespace dq::testing
