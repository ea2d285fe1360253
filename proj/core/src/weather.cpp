// Copyright 2026 The cosplan Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <random>

#include "cosplan/augment.hpp"
#include "cosplan/errors.hpp"
#include "cosplan/io.hpp"

namespace cosplan {

const std::vector<WeatherPreset>& builtin_weather_presets() {
  static const std::vector<WeatherPreset> pool{
      {"clear", 5, 0, 0, 60},         {"fair", 20, 0, 0, 60},        {"partly cloudy", 40, 0, 0, 60},
      {"cloudy", 70, 0, 0, 60},       {"overcast", 95, 0, 0, 60},    {"drizzle", 50, 15, 10, 50},
      {"light rain", 60, 30, 5, 50},  {"medium rain", 80, 60, 15, 30}, {"heavy rain", 95, 90, 25, 20},
      {"thin fog", 30, 0, 30, 30},    {"mist", 50, 0, 50, 20},       {"dense fog", 70, 0, 80, 10},
      {"smog", 60, 0, 60, 15},        {"dust haze", 70, 0, 70, 12},  {"snow haze", 90, 0, 40, 20},
  };
  return pool;
}

const std::vector<TodPreset>& builtin_tod_presets() {
  static const std::vector<TodPreset> pool{
      {"morning", 15, 90}, {"noon", 75, 180}, {"dusk", 0, 270}, {"night", -30, 0}};
  return pool;
}

namespace {

void check_range(double v, double lo, double hi, const std::string& what) {
  if (!(v >= lo && v <= hi))
    throw ConfigError(what + " out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

}  // namespace

std::vector<WeatherPreset> load_weather_pool(const std::filesystem::path& path) {
  const auto doc = read_json_file(path);
  std::vector<WeatherPreset> out;
  try {
    for (const auto& e : doc.at("presets")) {
      WeatherPreset p{e.at("name").get<std::string>(), e.at("cloudiness").get<double>(),
                      e.at("precipitation").get<double>(), e.at("fog_density").get<double>(),
                      e.at("fog_distance").get<double>()};
      check_range(p.cloudiness, 0, 100, p.name + ": cloudiness");
      check_range(p.precipitation, 0, 100, p.name + ": precipitation");
      check_range(p.fog_density, 0, 100, p.name + ": fog_density");
      if (!(p.fog_distance >= 0.0)) throw ConfigError(p.name + ": fog_distance must be >= 0");
      out.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (out.empty()) throw ConfigError(path.string() + ": empty weather pool");
  return out;
}

std::vector<TodPreset> load_tod_pool(const std::filesystem::path& path) {
  const auto doc = read_json_file(path);
  std::vector<TodPreset> out;
  try {
    for (const auto& e : doc.at("presets")) {
      TodPreset p{e.at("name").get<std::string>(), e.at("sun_altitude").get<double>(),
                  e.at("sun_azimuth").get<double>()};
      check_range(p.sun_altitude, -90, 90, p.name + ": sun_altitude");
      if (!(p.sun_azimuth >= 0.0 && p.sun_azimuth < 360.0)) throw ConfigError(p.name + ": sun_azimuth out of [0, 360)");
      out.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (out.empty()) throw ConfigError(path.string() + ": empty time-of-day pool");
  return out;
}

nlohmann::json weather_pool_to_json(const std::vector<WeatherPreset>& pool) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : pool)
    arr.push_back({{"name", p.name},
                   {"cloudiness", p.cloudiness},
                   {"precipitation", p.precipitation},
                   {"fog_density", p.fog_density},
                   {"fog_distance", p.fog_distance}});
  return {{"presets", arr}};
}

nlohmann::json tod_pool_to_json(const std::vector<TodPreset>& pool) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : pool)
    arr.push_back({{"name", p.name}, {"sun_altitude", p.sun_altitude}, {"sun_azimuth", p.sun_azimuth}});
  return {{"presets", arr}};
}

std::uint64_t weather_seed(std::uint64_t global_seed, std::uint64_t path_index) {
  return global_seed * 1000003ULL + path_index * 7919ULL + 11ULL;
}

WeatherMode parse_weather_mode(std::string_view name) {
  if (name == "off") return WeatherMode::kOff;
  if (name == "fixed") return WeatherMode::kFixed;
  if (name == "random_per_path" || name == "random") return WeatherMode::kRandomPerPath;
  throw ConfigError("weather mode must be off, fixed or random_per_path");
}

std::string_view weather_mode_name(WeatherMode m) {
  switch (m) {
    case WeatherMode::kOff: return "off";
    case WeatherMode::kFixed: return "fixed";
    case WeatherMode::kRandomPerPath: return "random_per_path";
  }
  return "unknown";
}

nlohmann::json WeatherSelection::to_json() const {
  return {{"mode", weather_mode_name(mode)},
          {"weather_name", weather.name},
          {"tod_name", tod.name},
          {"params",
           {{"cloudiness", weather.cloudiness},
            {"precipitation", weather.precipitation},
            {"fog_density", weather.fog_density},
            {"fog_distance", weather.fog_distance},
            {"sun_altitude_angle", tod.sun_altitude},
            {"sun_azimuth_angle", tod.sun_azimuth}}}};
}

std::optional<WeatherSelection> resolve_weather(const WeatherRequest& req, std::uint64_t path_index,
                                                const std::vector<WeatherPreset>& weather_pool,
                                                const std::vector<TodPreset>& tod_pool) {
  if (req.mode == WeatherMode::kOff) return std::nullopt;
  if (weather_pool.empty() || tod_pool.empty()) throw ConfigError("weather and time-of-day pools must be non-empty");
  WeatherSelection sel;
  sel.mode = req.mode;
  if (req.mode == WeatherMode::kFixed) {
    if (!req.weather_name || !req.tod_name) throw ConfigError("fixed weather mode needs both preset names");
    auto w = std::find_if(weather_pool.begin(), weather_pool.end(), [&](const auto& p) { return p.name == *req.weather_name; });
    auto t = std::find_if(tod_pool.begin(), tod_pool.end(), [&](const auto& p) { return p.name == *req.tod_name; });
    if (w == weather_pool.end()) throw ConfigError("unknown weather preset '" + *req.weather_name + "'");
    if (t == tod_pool.end()) throw ConfigError("unknown time-of-day preset '" + *req.tod_name + "'");
    sel.weather = *w;
    sel.tod = *t;
    return sel;
  }
  std::uint64_t seed;
  if (req.global_seed < 0) {
    std::random_device rd;
    seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  } else {
    seed = weather_seed(static_cast<std::uint64_t>(req.global_seed), path_index);
  }
  SplitMix64 rng(seed);
  sel.weather = weather_pool[rng.below(weather_pool.size())];
  sel.tod = tod_pool[rng.below(tod_pool.size())];
  return sel;
}

double draw_trajectory_fov(std::uint64_t global_seed, std::uint64_t path_index) {
  SplitMix64 rng(derive_seed(weather_seed(global_seed, path_index), 0xF0Fu));
  return kZoomLevelsDeg[rng.below(4)];
}

}  // namespace cosplan
