// SPDX-License-Identifier: Apache-2.0

#include "manycore/router.hpp"

namespace manycore {

const char* to_string(Direction d) {
    switch (d) {
        case Direction::P: return "P";
        case Direction::W: return "W";
        case Direction::E: return "E";
        case Direction::N: return "N";
        case Direction::S: return "S";
    }
    return "?";
}

Direction opposite(Direction d) {
    switch (d) {
        case Direction::W: return Direction::E;
        case Direction::E: return Direction::W;
        case Direction::N: return Direction::S;
        case Direction::S: return Direction::N;
        case Direction::P: return Direction::P;
    }
    return Direction::P;
}

}  // namespace manycore
