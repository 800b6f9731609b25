# Copyright 2026 The Metakernel Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import cmath
import math

import numpy as np
import pytest

import metakernel as mk


def test_version():
    assert mk.__version__.count(".") == 2


def test_kernel_values_and_errors():
    p = mk.KernelParams.su2(0.1, 1.0, 1.0)
    v = mk.su2_kernel_1d(0.5, p)
    assert abs(v - complex(0.98744141191854052659, 0.04686500529391214775)) < 1e-14
    q = mk.KernelParams.su11(2.0, 1.0, 1.0)
    assert abs(mk.su11_kernel_1d(math.pi, q) - 0.070650824853164465686) < 1e-14
    assert mk.contraction_limit_kernel(0.0, 2.0) == 1.0
    with pytest.raises(mk.PoleError):
        mk.KernelParams.su2(2.0, 1.0, math.pi / 2).validate()
    with pytest.raises(ValueError):
        mk.KernelParams(mk.Family.SU11, alpha=1.0, k=0.25)


def test_gram_is_hermitian_psd():
    rng = np.random.default_rng(0)
    xs = rng.uniform(0, math.pi, size=(12, 3))
    complex_gram, real_gram = mk.gram(xs, mk.KernelParams.su11(0.5, 1.5, 1.0))
    assert complex_gram.shape == (12, 12)
    np.testing.assert_allclose(complex_gram, complex_gram.conj().T, atol=1e-14)
    np.testing.assert_allclose(np.diag(real_gram), 1.0, atol=1e-14)
    assert np.linalg.eigvalsh(real_gram).min() > -1e-10


def test_fock_overlap_matches_closed_form():
    p = mk.KernelParams.su2(0.5, 2.0, 1.3)
    a, b = mk.coherent_state(0.7, p), mk.coherent_state(-0.4, p)
    assert abs(a.norm_squared() - 1.0) < 1e-14
    assert cmath.isclose(mk.overlap(a, b), mk.su2_kernel_1d(1.1, p), abs_tol=1e-13)


def test_curvature_and_mesh():
    p = mk.KernelParams.su11(1.0, 2.0, 1.0)
    for z in mk.probe_points(p, 5, 1):
        r = mk.curvature(z, p, "finite_difference")
        assert abs(r["ricci_scalar"] + 2.0) < 1e-4
    mesh = mk.surface_mesh(p, (0.0, 1.0), (-math.pi, math.pi), (10, 8))
    assert mesh["vertices"].shape == (80, 3)
    assert mesh["angular_factor"] > 1.0


def test_train_predict_roundtrip():
    train, test = mk.split(mk.make_moons(200, 0.2, 1), 0.7, 2, False)
    model, train_scores, test_scores = mk.fit_and_evaluate(
        train, test, mk.KernelParams.su2(0.5, 1.0, 2.0), mk.TrainConfig(c=10.0)
    )
    assert test_scores["accuracy"] > 0.85
    again = mk.SvmModel.from_json(model.to_json())
    np.testing.assert_array_equal(again.predict(test.features), model.predict(test.features))
    assert model.classes == [0, 1]


def test_grid_search_and_learning_curve():
    train, test = mk.split(mk.load_iris(), 0.7, 0, True)
    result = mk.grid_search(train, test, mk.Family.RBF, {"gamma": [0.5, 1.0], "c": [1.0, 10.0]})
    assert result["cells"] == 4
    assert result["best_score"] >= 0.9
    rows = mk.learning_curve(mk.load_iris(), result["best_params"], mk.TrainConfig(c=result["best_c"]), [0.5, 1.0])
    assert [r["fraction"] for r in rows] == [0.5, 1.0]


def test_smo_against_kkt():
    rng = np.random.default_rng(3)
    xs = rng.uniform(0, math.pi, size=(10, 2))
    labels = [1 if i % 2 == 0 else -1 for i in range(10)]
    _, k = mk.gram(xs, mk.KernelParams.rbf(1.0))
    sol = mk.train_binary(k, labels, mk.TrainConfig(c=1.0, tolerance=1e-8))
    assert sol.converged
    assert mk.verify_kkt(k, labels, sol.alpha, sol.bias, 1.0, 1e-6)["ok"]
