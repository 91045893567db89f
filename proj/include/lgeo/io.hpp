#pragma once

#include "lgeo/convergence.hpp"
#include "lgeo/core.hpp"
#include "lgeo/lattice.hpp"

#include <string>
#include <vector>

namespace lgeo {

/// Shortest-repeatable formatting: identical configs produce identical bytes.
std::string format_double(double v);

std::string format_point(const Vec& p);

struct DistanceRecord {
    std::string scenario;
    std::string kind;
    std::string p;
    std::string q;
    double spacing = 0.0;
    int stencil = 0;
    double value = 0.0;
    double tau_p = 0.0;
    double tau_q = 0.0;
    int path_len_nodes = 0;
};

DistanceRecord make_record(const std::string& scenario, const Vec& p, const Vec& q,
                           const DistanceResult& result);

/// Column order is part of the interface:
/// scenario,kind,p,q,spacing,stencil,value,tau_p,tau_q,path_len_nodes
std::string distance_csv(const std::vector<DistanceRecord>& records);
std::string distance_json(const std::vector<DistanceRecord>& records);

/// Column order: index,box_id,k,norm,lambda,anchor_residual,verdict
std::string convergence_csv(const ConvergenceReport& report);
std::string convergence_json(const ConvergenceReport& report);

} // namespace lgeo
