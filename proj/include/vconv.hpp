#pragma once

#include "vconv/closure.hpp"
#include "vconv/convergence.hpp"
#include "vconv/corpus.hpp"
#include "vconv/error.hpp"
#include "vconv/io.hpp"
#include "vconv/space.hpp"
#include "vconv/verdict.hpp"
#include "vconv/vmetric.hpp"
