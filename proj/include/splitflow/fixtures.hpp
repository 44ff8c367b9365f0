#pragma once

#include <string>
#include <vector>

#include "splitflow/profile.hpp"

namespace splitflow {

// Built-in model-shaped profiles: small hand instances (chain3, diamond,
// fig3, fig7), single-block networks (resblock, inception, denseblock) and
// full-model scale shapes (googlenet, resnet18, resnet50, densenet121).
ModelProfile make_fixture(const std::string& name);

std::vector<std::string> fixture_names();

}  // namespace splitflow
