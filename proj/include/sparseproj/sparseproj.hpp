#pragma once

#include <sparseproj/auxiliary.hpp>
#include <sparseproj/bench.hpp>
#include <sparseproj/error.hpp>
#include <sparseproj/oracle.hpp>
#include <sparseproj/problem.hpp>
#include <sparseproj/projection.hpp>
#include <sparseproj/rootfind.hpp>
#include <sparseproj/vector_io.hpp>
