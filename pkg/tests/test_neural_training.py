import numpy as np
import pytest

from _oracles import central_diff, rel_error
from offenseval.features import EncodedSequence
from offenseval.neural.model import (EarlyStopping, Network, TrainConfig, backward, batch_loss,
                                     default_epochs, forward, init_network, neural_predict,
                                     predict_labels, predict_proba, train_model)

BINARY = ("NOT", "OFF")
TERNARY = ("IND", "GRP", "OTH")


def _toy(rng, n=24, T=6, V=12):
    lengths = rng.integers(3, T + 1, size=n)
    ids = np.zeros((n, T), dtype=np.int64)
    y = np.arange(n) % 2
    for r in range(n):
        ids[r, :lengths[r]] = rng.integers(3, V, size=lengths[r])
        ids[r, 0] = 2 if y[r] else 3
    return ids, lengths, y


def test_early_stopping_sequence():
    stop = EarlyStopping(2)
    decisions = [stop.update(e, v) for e, v in enumerate([0.6, 0.5, 0.55, 0.58], start=1)]
    assert decisions == [(True, False), (True, False), (False, False), (False, True)]
    assert stop.best_epoch == 2
    never = EarlyStopping(None)
    assert all(not never.update(e, 1.0)[1] for e in range(1, 20))


def test_default_epochs():
    assert default_epochs("bilstm", "A") == 7 and default_epochs("lstm", "A") == 8
    assert default_epochs("cnn", "C") == 10


@pytest.mark.parametrize("arch", ["lstm", "bilstm", "cnn"])
@pytest.mark.parametrize("classes", [BINARY, TERNARY])
def test_network_gradient(rng, arch, classes):
    cfg = TrainConfig(dtype="float64", hidden=3, emb_dim=3, n_filters=4)
    net = init_network(arch, 8, classes, 5, cfg, rng)
    ids = rng.integers(1, 8, size=(3, 5))
    lengths = np.array([5, 3, 4])
    for r, n in enumerate(lengths):
        ids[r, n:] = 0
    y = rng.integers(0, len(classes), size=3)

    def loss():
        return batch_loss(net, forward(net, ids, lengths)[0], y)[0]
    scores, cache = forward(net, ids, lengths)
    grads = backward(net, cache, batch_loss(net, scores, y)[1])
    for name, p in net.params.items():
        numeric = central_diff(loss, p)
        if name == "embedding":
            numeric[0] = 0
        assert rel_error(grads[name], numeric) < 1e-4, name


def test_init_layout(rng):
    cfg = TrainConfig(hidden=5)
    net = init_network("bilstm", 10, BINARY, 4, cfg, rng)
    p = net.params
    assert p["embedding"].shape == (10, 60) and np.all(p["embedding"][0] == 0)
    assert p["dense_W"].shape == (1, 10)
    assert np.all(p["lstm_b"][5:10] == 1) and np.all(p["lstm_b"][:5] == 0)
    assert p["embedding"].dtype == np.float32
    cnn = init_network("cnn", 10, TERNARY, 4, TrainConfig(), rng)
    assert cnn.params["embedding"].shape[1] == 100 and cnn.params["dense_W"].shape == (3, 100)
    with pytest.raises(ValueError):
        init_network("cnn", 10, TERNARY, 2, TrainConfig(), rng)


@pytest.mark.parametrize("arch", ["lstm", "bilstm", "cnn"])
def test_zero_parameters_predict_documented_classes(rng, arch):
    cfg = TrainConfig(hidden=4, emb_dim=4, n_filters=4)
    ids = rng.integers(1, 6, size=(3, 5))
    lengths = np.full(3, 5)
    for classes, expected in ((BINARY, "OFF"), (TERNARY, "IND")):
        net = init_network(arch, 6, classes, 5, cfg, rng)
        for p in net.params.values():
            p[...] = 0
        assert predict_labels(net, ids, lengths) == [expected] * 3
        probs = predict_proba(net, ids, lengths)
        np.testing.assert_allclose(probs, 1 / len(classes))


def test_prediction_shape_checks(rng):
    net = init_network("lstm", 6, BINARY, 5, TrainConfig(hidden=2, emb_dim=2), rng)
    with pytest.raises(ValueError):
        predict_labels(net, np.ones((2, 4), dtype=int), [4, 4])
    with pytest.raises(ValueError):
        predict_proba(net, np.ones((2, 6), dtype=int), [4, 4])
    label, probs = neural_predict(net, EncodedSequence(np.array([1, 2, 0, 0, 0]), 2))
    assert label in BINARY and probs.sum() == pytest.approx(1)


def test_prediction_independent_of_batching(rng):
    net = init_network("bilstm", 12, TERNARY, 6, TrainConfig(hidden=4, emb_dim=4), rng)
    ids, lengths, _ = _toy(rng, n=17)
    a = predict_proba(net, ids, lengths, batch_size=256)
    b = predict_proba(net, ids, lengths, batch_size=4)
    np.testing.assert_allclose(a, b, atol=1e-6)


@pytest.mark.parametrize("arch", ["lstm", "cnn"])
def test_training_is_deterministic(rng, arch):
    ids, lengths, y = _toy(rng)
    cfg = TrainConfig(epochs=3, hidden=6, emb_dim=6, n_filters=6, seed=4, batch_size=8)
    n1, h1 = train_model(arch, (ids, lengths, y), (ids, lengths, y), cfg, BINARY)
    n2, h2 = train_model(arch, (ids, lengths, y), (ids, lengths, y), cfg, BINARY)
    assert h1 == h2
    assert all(np.array_equal(n1.params[k], n2.params[k]) for k in n1.params)


def test_history_and_best_epoch_contract(rng):
    ids, lengths, y = _toy(rng, n=32)
    cfg = TrainConfig(epochs=8, hidden=8, emb_dim=8, learning_rate=0.05, patience=None,
                      batch_size=8)
    net, hist = train_model("lstm", (ids, lengths, y), (ids[:8], lengths[:8], 1 - y[:8]), cfg,
                            BINARY)
    assert len(hist.train_loss) == len(hist.val_loss) == 8
    assert hist.best_epoch == int(np.argmin(hist.val_loss)) + 1
    # the returned parameters are the best epoch's: re-scoring reproduces its val loss
    scores, _ = forward(net, ids[:8], lengths[:8])
    assert batch_loss(net, scores, 1 - y[:8])[0] == pytest.approx(
        hist.val_loss[hist.best_epoch - 1], rel=1e-5)
    csv = hist.to_csv().splitlines()
    assert csv[0] == "epoch,train_loss,val_loss,val_acc,val_macro_f1" and len(csv) == 9


def test_early_stopping_truncates_history(rng):
    ids, lengths, y = _toy(rng, n=16)
    cfg = TrainConfig(epochs=30, hidden=4, emb_dim=4, learning_rate=0.1, patience=1)
    _, hist = train_model("cnn", (ids, lengths, y), (ids, lengths, 1 - y), cfg, BINARY)
    assert len(hist.val_loss) < 30
    assert len(hist.val_loss) == hist.best_epoch + 1


def test_pad_row_stays_zero(rng):
    ids, lengths, y = _toy(rng)
    net, _ = train_model("bilstm", (ids, lengths, y), (ids, lengths, y),
                         TrainConfig(epochs=2, hidden=4, emb_dim=4, l2_lambda=0.1), BINARY)
    assert np.all(net.params["embedding"][0] == 0)


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(dropout_p=1.0)
    with pytest.raises(ValueError):
        TrainConfig(optimizer="rmsprop")
    with pytest.raises(ValueError):
        train_model("lstm", (np.zeros((0, 3), int), np.zeros(0), np.zeros(0)),
                    (np.ones((1, 3), int), np.ones(1), np.zeros(1)), TrainConfig(), BINARY)


def test_network_is_plain_data(rng):
    net = init_network("lstm", 5, BINARY, 3, TrainConfig(hidden=2, emb_dim=2), rng)
    assert isinstance(net, Network) and net.binary and net.dtype == np.float32
