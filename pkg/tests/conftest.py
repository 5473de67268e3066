import pytest

from threadwatch import labeler, synthgen


@pytest.fixture(scope="session")
def small_synth():
    """200-thread corpus with the default mixed strategy blend."""
    return synthgen.generate(synthgen.GeneratorConfig(seed=42, n_threads=200))


@pytest.fixture(scope="session")
def bench_synth():
    """The full 2,000-thread benchmark used by the acceptance suite."""
    return synthgen.generate(synthgen.GeneratorConfig(seed=42, n_threads=2000))


@pytest.fixture(scope="session")
def small_labels(small_synth):
    table = labeler.ShortenerTable(set(small_synth.shortener_hosts),
                                   small_synth.shortener_map)
    observations = labeler.collect_observations(small_synth.corpus, table)
    labels = labeler.join_blacklist(observations, small_synth.blacklist)
    return observations, labels


@pytest.fixture(scope="session")
def bench_labels(bench_synth):
    table = labeler.ShortenerTable(set(bench_synth.shortener_hosts),
                                   bench_synth.shortener_map)
    observations = labeler.collect_observations(bench_synth.corpus, table)
    labels = labeler.join_blacklist(observations, bench_synth.blacklist)
    return observations, labels
