#pragma once

#include "cascan/certify.hpp"
#include "cascan/dynamics.hpp"
#include "cascan/errors.hpp"
#include "cascan/rule.hpp"
#include "cascan/scan.hpp"
