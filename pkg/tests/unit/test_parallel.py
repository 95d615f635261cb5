from multiprocessing import cpu_count

import pytest

from rising_gue import exceptions as ex
from rising_gue.parallel import THREADS_ENV, resolve_workers, run_ordered


def test_explicit_threads_win(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "7")

    assert resolve_workers(3) == 3


def test_threads_from_environment(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, "5")

    assert resolve_workers() == 5


def test_default_threads(monkeypatch):
    monkeypatch.delenv(THREADS_ENV, raising=False)

    assert resolve_workers() == cpu_count()


@pytest.mark.parametrize("env, field_name", [("many", THREADS_ENV), ("0", "threads")])
def test_invalid_environment(monkeypatch, env: str, field_name: str):
    monkeypatch.setenv(THREADS_ENV, env)

    with pytest.raises(ex.ConfigError) as e:
        resolve_workers()

    assert e.value.field_name == field_name


@pytest.mark.parametrize("threads", [0, -2])
def test_invalid_threads(threads: int):
    with pytest.raises(ex.ConfigError):
        resolve_workers(threads)


@pytest.mark.parametrize("workers", [1, 2, 4])
def test_run_ordered_keeps_order(workers: int):
    items = [-5, 3, -1, 8, 0, -2]

    assert run_ordered(abs, items, workers) == [5, 3, 1, 8, 0, 2]


def test_run_ordered_empty():
    assert run_ordered(abs, [], 4) == []
