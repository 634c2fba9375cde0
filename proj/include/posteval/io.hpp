#pragma once

// File formats.
//
// Events CSV (UTF-8, LF). Optional leading metadata lines start with '#',
// e.g. "# seed=7". The first other line is the exact header
// "event_id,x,z_true"; each following line is one event.
//
// Predictions JSONL: one object per line,
//   {"event_id":0,"dist":{"type":"point","value":0.0}}
//   {"event_id":1,"dist":{"type":"gaussian","mu":0.0,"sigma":1.0}}
//   {"event_id":2,"dist":{"type":"mixture","weights":[..],"means":[..],"sigmas":[..]}}
//   {"event_id":3,"dist":{"type":"samples","values":[..]}}
//   {"event_id":4,"dist":{"type":"grid","lo":-5.0,"hi":5.0,"density":[..]}}
//
// Reals are written in shortest round-trip form, so write -> read is exact.

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "posteval/types.hpp"

namespace posteval {

struct EventsFile {
    std::vector<EventRecord> events;
    std::map<std::string, std::string> metadata;  // from "# key=value" lines
};

EventsFile read_events_file(const std::filesystem::path& path);
std::vector<EventRecord> read_events(const std::filesystem::path& path);
std::vector<EventRecord> parse_events(std::istream& in, std::map<std::string, std::string>* metadata = nullptr);

void write_events(const std::filesystem::path& path, std::span<const EventRecord> events,
                  const std::map<std::string, std::string>& metadata = {});

nlohmann::ordered_json distribution_to_json(const PredictiveDistribution& dist);
PredictiveDistribution distribution_from_json(const nlohmann::json& j);

using PredictionMap = std::map<std::int64_t, PredictiveDistribution>;

PredictionMap read_predictions(const std::filesystem::path& path);
PredictionMap parse_predictions(std::istream& in);

void write_predictions(const std::filesystem::path& path, std::span<const EventRecord> events,
                       std::span<const PredictiveDistribution> dists);

/// Shortest decimal form that parses back to the same double.
std::string format_real(double v);

/// FNV-1a 64 over the canonical CSV rendering of the events, as hex.
std::string dataset_hash(std::span<const EventRecord> events);

/// Writes `content` to a temporary sibling and renames it into place, so a
/// failed run never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace posteval
