#pragma once

#include <filesystem>

#include "clband/config.hpp"
#include "clband/physics_model.hpp"

namespace clband::test {

inline CacheOptions shared_cache() { return {true, CLBAND_TEST_CACHE}; }

inline std::filesystem::path data_file(const char* name) {
  return std::filesystem::path(CLBAND_DATA_DIR) / name;
}

// 8 + 8 channels with the default physics; cheap enough for unit tests.
inline PhysicsSettings small_settings() {
  PhysicsSettings s;
  s.grid.c_channels = 8;
  s.grid.l_channels = 8;
  return s;
}

inline const UniformPowerModel& small_model() {
  static const UniformPowerModel model =
      make_uniform_power_model(small_settings(), 0, shared_cache());
  return model;
}

// Default 64 + 64 plan. The first call may take minutes on a cold cache.
inline const UniformPowerModel& full_model() {
  static const UniformPowerModel model =
      make_uniform_power_model(PhysicsSettings{}, 0, shared_cache());
  return model;
}

}  // namespace clband::test
