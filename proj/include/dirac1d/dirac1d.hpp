#pragma once

#include "errors.hpp"
#include "core.hpp"
#include "closedform.hpp"
#include "matcher.hpp"
#include "resonance.hpp"
#include "io.hpp"
#include "commands.hpp"
