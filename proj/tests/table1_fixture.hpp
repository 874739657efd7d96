#pragma once

#include <string>

#include "routesim/catalog.hpp"

// The reference 4x4 topology used across the test suites, matching
// data/table1.json. Kept inline so the unit binary has no path dependency.
inline const char* kTable1Json = R"({
  "networks": [
    { "id": "n1", "region": "cn", "threshold_load": 4, "servers": [
      { "id": "s1", "internal_ip": "192.168.10.50", "threshold_load": 1, "apps": ["App1", "App2", "App3", "App4"] },
      { "id": "s2", "internal_ip": "192.168.10.60", "threshold_load": 1, "apps": ["App1", "App2", "App4"] },
      { "id": "s3", "internal_ip": "192.168.10.70", "threshold_load": 1, "apps": ["App1", "App4"] },
      { "id": "s4", "internal_ip": "192.168.10.80", "threshold_load": 1, "apps": ["App2", "App3"] } ] },
    { "id": "n2", "region": "cn", "threshold_load": 4, "servers": [
      { "id": "s1", "internal_ip": "192.168.20.50", "threshold_load": 1, "apps": ["App1"] },
      { "id": "s2", "internal_ip": "192.168.20.60", "threshold_load": 1, "apps": ["App1", "App2"] },
      { "id": "s3", "internal_ip": "192.168.20.70", "threshold_load": 1, "apps": ["App1", "App2", "App3"] },
      { "id": "s4", "internal_ip": "192.168.20.80", "threshold_load": 1, "apps": ["App3"] } ] },
    { "id": "n3", "region": "cn", "threshold_load": 4, "servers": [
      { "id": "s1", "internal_ip": "192.168.30.50", "threshold_load": 1, "apps": ["App1"] },
      { "id": "s2", "internal_ip": "192.168.30.60", "threshold_load": 1, "apps": ["App1"] },
      { "id": "s3", "internal_ip": "192.168.30.70", "threshold_load": 1, "apps": ["App1", "App3"] },
      { "id": "s4", "internal_ip": "192.168.30.80", "threshold_load": 1, "apps": ["App2"] } ] },
    { "id": "n4", "region": "cn", "threshold_load": 4, "servers": [
      { "id": "s1", "internal_ip": "192.168.40.50", "threshold_load": 1, "apps": ["App2", "App3"] },
      { "id": "s2", "internal_ip": "192.168.40.60", "threshold_load": 1, "apps": ["App3", "App4"] },
      { "id": "s3", "internal_ip": "192.168.40.70", "threshold_load": 1, "apps": ["App2", "App4"] },
      { "id": "s4", "internal_ip": "192.168.40.80", "threshold_load": 1, "apps": ["App2", "App3", "App4"] } ] }
  ],
  "ip_regions": {}
})";

inline routesim::NsMap table1() { return routesim::load_topology(kTable1Json); }
