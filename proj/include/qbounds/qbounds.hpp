#pragma once

#include <qbounds/bell.hpp>
#include <qbounds/error.hpp>
#include <qbounds/hull.hpp>
#include <qbounds/io.hpp>
#include <qbounds/linalg.hpp>
#include <qbounds/polytope.hpp>
#include <qbounds/probability.hpp>
#include <qbounds/qbody.hpp>
#include <qbounds/quantum.hpp>
