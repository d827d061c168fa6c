#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "dspec/dspec.h"

namespace {

const char* kTiny = R"({
  "pipeline": "profile-complexity",
  "seed": 4,
  "system": {"kind": "cyclic_shift", "size": 6},
  "n_grid": [1, 2],
  "eps_grid": [0.3]
})";

}  // namespace

TEST_CASE("status codes and last error") {
  dspec_config* c = nullptr;
  CHECK(dspec_config_from_json("{not json", nullptr, 0, 0, &c) == DSPEC_ERR_CONFIG);
  CHECK(c == nullptr);
  CHECK(std::strstr(dspec_last_error(), "invalid JSON") != nullptr);
  CHECK(dspec_config_from_json(R"({"pipeline": "profile-complexity", "seed": 1})", nullptr, 0, 0, &c) == DSPEC_ERR_CONFIG);
  CHECK(std::strstr(dspec_last_error(), "$.system") != nullptr);
  CHECK(dspec_config_from_json(kTiny, "no-such-verb", 0, 0, &c) == DSPEC_ERR_CONFIG);
  CHECK(dspec_config_from_json(nullptr, nullptr, 0, 0, &c) == DSPEC_ERR_INPUT);
  CHECK(dspec_config_from_preset("missing", nullptr, 0, 0, &c) == DSPEC_ERR_CONFIG);
  CHECK(std::string(dspec_status_name(DSPEC_ERR_RESOURCE)) == "resource");
  REQUIRE(dspec_config_from_json(kTiny, nullptr, 0, 0, &c) == DSPEC_OK);
  CHECK(std::string(dspec_last_error()).empty());
  dspec_result* r = nullptr;
  CHECK(dspec_run(c, 0, 0, &r) == DSPEC_ERR_INPUT);
  dspec_config_free(c);
}

TEST_CASE("run through handles") {
  dspec_config* c = nullptr;
  REQUIRE(dspec_config_from_json(kTiny, "profile-complexity", 1, 77, &c) == DSPEC_OK);
  CHECK(std::string(dspec_config_pipeline(c)) == "profile-complexity");
  char hash[65];
  REQUIRE(dspec_config_hash(c, hash) == DSPEC_OK);
  CHECK(std::strlen(hash) == 64);
  dspec_result* r = nullptr;
  REQUIRE(dspec_run(c, 2, 0, &r) == DSPEC_OK);
  CHECK(dspec_result_exit_code(r) == 0);
  REQUIRE(dspec_result_file_count(r) == 3);
  CHECK(std::string(dspec_result_file_name(r, 0)) == "profile.csv");
  size_t n = 0;
  const char* data = dspec_result_file_data(r, 0, &n);
  const std::string csv(data, n);
  CHECK(csv.find(hash) != std::string::npos);
  CHECK(csv.find(",77,") != std::string::npos);  // overridden seed in the seed column
  CHECK(std::string(dspec_result_summary(r)).find("\"verdict\"") != std::string::npos);
  CHECK(dspec_result_file_name(r, 3) == nullptr);

  const auto dir = std::filesystem::temp_directory_path() / "dspec_capi_test";
  std::filesystem::remove_all(dir);
  REQUIRE(dspec_result_write(r, dir.string().c_str()) == DSPEC_OK);
  std::ifstream in(dir / "profile.csv", std::ios::binary);
  const std::string disk((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(disk == csv);
  dspec_result_free(r);
  dspec_config_free(c);
  std::filesystem::remove_all(dir);
}

TEST_CASE("presets through the C API") {
  REQUIRE(dspec_preset_count() > 0);
  CHECK(dspec_preset_name(dspec_preset_count()) == nullptr);
  for (size_t i = 0; i < dspec_preset_count(); ++i) CHECK(dspec_preset_json(dspec_preset_name(i)) != nullptr);
  dspec_config* c = nullptr;
  CHECK(dspec_config_from_preset("rotation-bounded", "ap-test", 0, 0, &c) == DSPEC_ERR_CONFIG);
  REQUIRE(dspec_config_from_preset("tempered-boxes", "check-tempered", 0, 0, &c) == DSPEC_OK);
  dspec_config_free(c);
}

TEST_CASE("one-shot run") {
  int code = -1;
  CHECK(dspec_run_config(kTiny, nullptr, 1, &code) == DSPEC_OK);
  CHECK(code == 0);
  CHECK(dspec_run_config(R"({"seed": 1})", nullptr, 1, &code) == DSPEC_ERR_CONFIG);
  CHECK(code == 1);
}
