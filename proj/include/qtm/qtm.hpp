#pragma once

#include "qtm/error.hpp"
#include "qtm/linalg.hpp"
#include "qtm/qstates.hpp"
#include "qtm/scoreops.hpp"
#include "qtm/pom.hpp"
#include "qtm/binary.hpp"
#include "qtm/multi.hpp"
