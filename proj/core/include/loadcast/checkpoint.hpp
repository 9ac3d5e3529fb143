#pragma once

#include <map>
#include <string>

#include "loadcast/lstm.hpp"

namespace loadcast {

// Versioned plain-text tensor dump. Values are written as C hex floats, so a
// load reproduces predictions bit for bit. `meta` carries the run
// configuration echo (loss, seeds, split year, ...) as flat key/value pairs.
struct Checkpoint {
    LstmModel model;
    std::map<std::string, std::string> meta;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace loadcast
