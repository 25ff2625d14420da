import dataclasses

import pytest
from hypothesis import given, settings, strategies as st

from topk_bandit import config as cfg
from topk_bandit.errors import ConfigError, DataError


def write(tmp_path, text, name="c.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_minimal_config_takes_defaults(tmp_path):
    c = cfg.load_config(write(tmp_path, "env.kind=synthetic\n"))
    assert (c.env.n, c.env.K, c.env.noise_scale, c.env.dim) == (20, 3, 0.1, 10)
    assert (c.model.kind, c.policy.kind, c.T, c.retrain_every, c.epochs_per_fit) == ("linear", "greedy", 1000, 1, 16)
    echo = cfg.format_config(c)
    assert set(cfg.parse_config_text(echo)) == set(cfg.KNOWN_KEYS)
    n_fields = 4 + sum(len(dataclasses.fields(s)) for s in (c.env, c.model, c.policy))
    assert echo.count(" = ") == n_fields == len(cfg.KNOWN_KEYS)


def test_k_greater_than_n(tmp_path):
    with pytest.raises(ConfigError, match="K <= n required"):
        cfg.load_config(write(tmp_path, "env.K=10\nenv.n=5\n"))


def test_mnist_cnn_config_is_accepted(tmp_path):
    c = cfg.load_config(write(tmp_path, "env.kind=mnist\nenv.n=20\nenv.K=5\nmodel.kind=cnn\n"))
    assert (c.env.n, c.env.K, c.model.kind, c.env.noise_scale) == (20, 5, "cnn", 2.0)


def test_unknown_key_is_named(tmp_path):
    with pytest.raises(ConfigError, match="'model.depth'"):
        cfg.load_config(write(tmp_path, "model.depth = 3\n"))


@pytest.mark.parametrize("text,domain", [
    ("env.n = many", "expected an integer"),
    ("env.noise_scale = loud", "expected a number"),
    ("env.exact_balance = maybe", "expected true/false"),
    ("policy.kind = ucb", "must be one of"),
    ("policy.epsilon0 = 2", r"\[0, 1\]"),
])
def test_invalid_values_state_the_domain(tmp_path, text, domain):
    with pytest.raises(ConfigError, match=domain):
        cfg.load_config(write(tmp_path, text + "\n"))


def test_sections_comments_and_blank_lines(tmp_path):
    text = "# header\n[env]\nkind = mushroom  # trailing\n\n[policy]\nkind = decaying_epsilon\nrun.T = 7\n"
    c = cfg.load_config(write(tmp_path, text))
    assert (c.env.kind, c.policy.kind, c.T) == ("mushroom", "decaying_epsilon", 7)


def test_malformed_line_and_missing_file(tmp_path):
    with pytest.raises(ConfigError, match=":2:"):
        cfg.load_config(write(tmp_path, "env.kind=synthetic\njust words\n"))
    with pytest.raises(DataError, match="nope.cfg"):
        cfg.load_config(tmp_path / "nope.cfg")


configs = st.fixed_dictionaries({}, optional={
    "env.kind": st.sampled_from(["synthetic", "mushroom", "mnist"]),
    "env.noise_scale": st.floats(0, 5),
    "env.exact_balance": st.booleans(),
    "env.data_path": st.sampled_from(["/data/x", None]),
    "model.kind": st.sampled_from(["linear", "neural_linear", "mlp", "cnn"]),
    "model.hidden": st.sampled_from([100, 1000]),
    "model.dropout": st.floats(0, 0.9),
    "model.learning_rate": st.floats(1e-6, 1),
    "policy.kind": st.sampled_from(["greedy", "random", "epsilon_greedy", "decaying_epsilon", "thompson_dropout"]),
    "policy.epsilon0": st.floats(0, 1),
    "run.T": st.integers(1, 10**6),
    "run.seed": st.integers(0, 2**63),
})


@settings(max_examples=100)
@given(configs)
def test_echo_round_trips(values):
    c = cfg.build_config(values)
    again = cfg.build_config(cfg.parse_config_text(cfg.format_config(c)))
    assert again == c
    assert again.fingerprint() == c.fingerprint()
