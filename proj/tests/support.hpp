#pragma once

#include <kspin/report.hpp>

#include <gtest/gtest.h>

#include <string>

inline ::testing::AssertionResult AllPass(const kspin::Report& rep)
{
    if (rep.size() == 0) return ::testing::AssertionFailure() << "empty report";
    if (rep.all_pass()) return ::testing::AssertionSuccess();
    auto out = ::testing::AssertionFailure();
    for (const auto& c : rep.failures()) out << c.id << " [" << c.eq_tag << "] residual " << c.residual << "\n";
    return out;
}
