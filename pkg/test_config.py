import pytest

from config import (
    ConfigError, ExplicitK, KFloorError, KPolicy, LambdaSix, MinKineq,
    OutputFormat, RunConfig, SpaceKind, env_flag, env_float, env_int, k_floor,
    make_policy, resolve_k,
)


def test_k_floor():
    assert [k_floor(lam) for lam in (1, 2, 3)] == [4, 36, 144]


def test_policies():
    assert MinKineq()(3) == 144.0
    assert LambdaSix()(1) == 4.0
    assert LambdaSix()(2) == 64.0
    assert ExplicitK(50)(2) == 50.0
    assert repr(ExplicitK(50)) == "ExplicitK(50.0)"


@pytest.mark.parametrize("policy,k_value,lam,expected", [
    ("min_kineq", None, 2, 36.0),
    (KPolicy.LAMBDA6, None, 3, 729.0),
    ("explicit", 100.0, 2, 100.0),
    (lambda lam: 10.0 * k_floor(lam), None, 2, 360.0),
])
def test_resolve_k(policy, k_value, lam, expected):
    assert resolve_k(policy, lam, k_value) == expected


def test_resolve_k_errors():
    with pytest.raises(KFloorError) as e:
        resolve_k("explicit", 2, 35.0)
    assert e.value.floor == 36
    assert e.value.lam == 2
    with pytest.raises(ConfigError):
        resolve_k("min_kineq", 0)
    with pytest.raises(ConfigError):
        resolve_k("min_kineq", 1.5)
    with pytest.raises(ConfigError):
        make_policy("lambda7")
    with pytest.raises(ConfigError):
        make_policy("explicit")
    with pytest.raises(ConfigError):
        make_policy("lambda6", 100.0)
    with pytest.raises(KFloorError):
        resolve_k(lambda lam: float("inf"), 1)


def test_run_config_defaults():
    cfg = RunConfig()
    assert cfg.space is SpaceKind.CIRCLE
    assert cfg.output_format is OutputFormat.JSON
    assert list(cfg.lambdas()) == [1, 2, 3, 4]
    assert cfg.k_for(4) == 400.0


def test_run_config_coerces_strings():
    cfg = RunConfig(space="sphere", k_policy="lambda6", output_format="csv")
    assert cfg.space is SpaceKind.SPHERE
    assert cfg.k_policy is KPolicy.LAMBDA6
    assert cfg.output_format is OutputFormat.CSV


@pytest.mark.parametrize("kwargs", [
    dict(space="torus"),
    dict(output_format="xml"),
    dict(lambda_min=0),
    dict(lambda_min=3, lambda_max=2),
    dict(tol=-1.0),
    dict(tol=float("nan")),
    dict(seed=-1),
    dict(samples=0),
    dict(mu=float("inf")),
    dict(nodes_theta=0),
    dict(k_policy="explicit", k_value=10.0, lambda_max=2),
])
def test_run_config_rejects(kwargs):
    with pytest.raises(ConfigError):
        RunConfig(**kwargs)


def test_env_helpers(monkeypatch):
    monkeypatch.delenv("FUZZY_DEBUG", raising=False)
    monkeypatch.setenv("FUZZY_TEST_FLAG", "1")
    assert env_flag("FUZZY_TEST_FLAG")
    monkeypatch.setenv("FUZZY_TEST_FLAG", "no")
    assert not env_flag("FUZZY_TEST_FLAG")
    monkeypatch.setenv("FUZZY_DEBUG", "yes")
    assert env_flag("FUZZY_TEST_FLAG")

    monkeypatch.setenv("FUZZY_TEST_FLOAT", "5")
    assert env_float("FUZZY_TEST_FLOAT", 1.0, 0.0, 2.0) == 2.0
    monkeypatch.setenv("FUZZY_TEST_FLOAT", "inf")
    assert env_float("FUZZY_TEST_FLOAT", 1.0, 0.0, 2.0) == 1.0
    monkeypatch.setenv("FUZZY_TEST_FLOAT", "junk")
    assert env_float("FUZZY_TEST_FLOAT", 1.0, 0.0, 2.0) == 1.0
    monkeypatch.setenv("FUZZY_TEST_INT", "-3")
    assert env_int("FUZZY_TEST_INT", 7, 0, 10) == 0
    monkeypatch.delenv("FUZZY_TEST_INT")
    assert env_int("FUZZY_TEST_INT", 7, 0, 10) == 7
