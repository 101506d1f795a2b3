#pragma once

#include <string>
#include <vector>

namespace programs {

extern const char* const kWhere;           // where/elsewhere guarding 1/x
extern const char* const kNeighborRead;    // r = v[3+XPLUS_NP] plus a there-and-back shift
extern const char* const kRemoteMethod;    // v[0+XPLUS_NP].f(a)
extern const char* const kLocalOffset;     // localoffset(li); r = a[i];
extern const char* const kMatrixSum;       // distributed 8x8 sum on a 2x2 torus

struct Named {
  std::string name;
  std::string source;
};

// Every *.cpp in tests/corpus, sorted by name.
std::vector<Named> corpus();

}  // namespace programs
