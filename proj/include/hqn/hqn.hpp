#pragma once

#include "hqn/cli.hpp"
#include "hqn/entropy.hpp"
#include "hqn/errors.hpp"
#include "hqn/mixture.hpp"
#include "hqn/model_file.hpp"
#include "hqn/numeric.hpp"
#include "hqn/qkd.hpp"
