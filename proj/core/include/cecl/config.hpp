#pragma once

#include <string>
#include <vector>

#include "cecl/pipeline.hpp"

namespace cecl::config {

// Applies "key = value" lines ('#' comments allowed) on top of cfg.
// Unknown keys and out-of-range values throw ParseError / ParamError.
void apply_text(pipeline::PipelineConfig& cfg, const std::string& text);

// Sets a single dotted key, e.g. "hough.min_completeness".
void apply_key(pipeline::PipelineConfig& cfg, const std::string& key, const std::string& value);

pipeline::PipelineConfig load_file(const std::string& path,
                                   pipeline::PipelineConfig base = {});

// Re-checks every invariant (fractions in range, odd kernel, radius bounds
// ordered). Throws ParamError.
void validate(const pipeline::PipelineConfig& cfg);

// Serializes every field as "key = value" lines; apply_text(parse) is the
// identity on it.
std::string to_string(const pipeline::PipelineConfig& cfg);

// Threshold grid spec: "77" (single value), "60:10:100" (start:step:stop,
// inclusive), or "60,70,85" (list). Values must stay in [0, 255] and
// ascend.
std::vector<int> parse_grid(const std::string& spec);

} // namespace cecl::config
