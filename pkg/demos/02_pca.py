"""PCA: fitting, projection and reconstruction error."""

import numpy as np

from ecocnet.features import pca_fit, pca_project, pca_reconstruct

rng = np.random.default_rng(0)
# 60 samples in 40 dimensions, most of the variance in the first few axes
x = rng.normal(size=(60, 40)) * np.geomspace(5, 0.05, 40)

model = pca_fit(x, 10)
print("eigenvalues:", np.round(model.eigenvalues, 3))
print("components are orthonormal:",
      np.allclose(model.components @ model.components.T, np.eye(10)))

y = pca_project(model, x)
cov = np.cov(y, rowvar=False)
print("projected covariance is diagonal:", np.allclose(cov, np.diag(model.eigenvalues)))

# Reconstruction error shrinks as k grows.
for k in (1, 2, 5, 10, 20, 40):
    m = pca_fit(x, k)
    mse = np.mean((pca_reconstruct(m, pca_project(m, x)) - x) ** 2)
    print(f"k={k:2d}  reconstruction MSE={mse:.5f}")

# With more dimensions than samples the fit uses the N x N Gram matrix.
wide = rng.normal(size=(20, 1024))
print("wide data, k=19:", pca_fit(wide, 19).components.shape)
