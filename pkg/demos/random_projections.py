"""Random cosine features: a frozen, data-independent nonlinear map.

Each output feature is cos(x . theta + b) with theta ~ N(0, 1/(2d)) and
b ~ unif(-pi, pi).  Because the map never looks at the data, it can be
shared across all learners and survives unlearning untouched -- nothing
about a forgotten sample hides in the feature map.
"""

import numpy as np

from codedunlearn import (
    SyntheticSpec,
    gen_synthetic,
    learn,
    make_projection,
    normalize,
    predict,
    project,
    unlearn,
)

d, D = 8, 64
pmap = make_projection(d, D, seed=123)
print(f"projection {d} -> {D}")
print(f"  direction variance {pmap.directions.var():.4f} "
      f"(target 1/(2d) = {1 / (2 * d):.4f})")
print(f"  offsets in ({pmap.offsets.min():.3f}, {pmap.offsets.max():.3f}) "
      "(target (-pi, pi))")

# nonlinear regression problem a linear model cannot fit raw; features are
# min-max normalized to [0, 1] first so the cosine map sees bounded inputs
ds = gen_synthetic(SyntheticSpec("mlp", n=3000, d=d, mu=1.0, sigma2=1.0,
                                 seed=9))
train, test, _ = normalize(ds.subset(np.arange(2500)),
                           ds.subset(np.arange(2500, 3000)))


def test_mse(model):
    return float(np.mean((predict(model, test.features) - test.response) ** 2))


linear, _, _ = learn(train, s=10, r=2, rho="minimal", lam=1e-3, seed=4)
cosine, store, _ = learn(train, s=10, r=2, rho="minimal", lam=1e-3,
                         projection=pmap, seed=4)
print(f"\ntest MSE raw features:    {test_mse(linear):.4f}")
print(f"test MSE cosine features: {test_mse(cosine):.4f}")

frozen = (pmap.directions.copy(), pmap.offsets.copy())
unlearn(cosine, store, [17])
same = ((cosine.projection.directions == frozen[0]).all()
        and (cosine.projection.offsets == frozen[1]).all())
print(f"\nprojection bit-identical after unlearning: {same}")
print(f"sample feature row: {project(pmap, test.features[:1])[0, :4]} ...")
