#pragma once

#include <nevan/error.hpp>
#include <nevan/expr.hpp>
#include <nevan/meromorphic.hpp>
#include <nevan/parallel.hpp>
#include <nevan/quad.hpp>
#include <nevan/divisor.hpp>
#include <nevan/nevanlinna.hpp>
#include <nevan/difference.hpp>
#include <nevan/applications.hpp>
#include <nevan/io.hpp>
