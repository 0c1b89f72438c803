#pragma once

#include "qca/zf.hpp"

namespace qca::fx {

// Rank-2 abelian fixture: vacuum and one degree-1 vector, every non-unit
// product zero, T = 0.
inline Algebra triv() {
    Algebra A;
    A.V.basis = {{"1", 0}, {"a", 1}};
    A.V.vacuum = 0;
    A.V.depth = 1;
    A.V.h_order = 1;
    A.V.lambda_cap = 6;
    A.V.T = Op(2);
    A.V.finalize();
    A.tab.lam.assign(2, std::vector<VecPoly>(2, VecPoly(6)));
    A.tab.dot.assign(2, std::vector<Vec>(2));
    A.tab.dot[0][0] = A.V.unit(0);
    A.tab.dot[0][1] = A.V.unit(1);
    A.tab.dot[1][0] = A.V.unit(1);
    return A;
}

// Symplectic free-boson pair: generators b, g with <b,g> = 1 = -<g,b>,
// identity braiding. The one-generator symmetric-form variant collapses under
// the exchange relation, so the consistent classical fixture is this pair.
inline ZFBuild bos(int depth = 4, int lambda_cap = 6) {
    FSeries one = FSeries::monomial({'x'}, {0}, HSeries::one(1));
    ZFSpec s = zf_scalar_spec({"b", "g"},
                              {{rat(0), rat(1)}, {rat(-1), rat(0)}}, one, depth, 1, lambda_cap);
    s.name = "fx-bos";
    return build_zf(s);
}

// h-deformed fixture: same pair with scalar braiding 1 + h*s(x) on all
// generator pairs, truncated at h^2.
inline ZFBuild zf_h(int depth = 3, int lambda_cap = 6, const char *spoly = "x") {
    FSeries g({'x'});
    g.add_term({0}, HSeries::one(2));
    if (std::string(spoly) == "x")
        g.add_term({1}, HSeries::h_power(2, 1));
    else if (std::string(spoly) == "x^2")
        g.add_term({2}, HSeries::h_power(2, 1));
    else if (std::string(spoly) == "1")
        g.add_term({0}, HSeries::h_power(2, 1));
    ZFSpec s = zf_scalar_spec({"b", "g"},
                              {{rat(0), rat(1)}, {rat(-1), rat(0)}}, g, depth, 2, lambda_cap);
    s.name = "fx-zf-h";
    return build_zf(s);
}

} // namespace qca::fx
