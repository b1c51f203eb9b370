import numpy as np
import pytest

from cfdiag.network import DiseaseNode, Edge, NoisyOrNetwork, RiskFactor, SymptomNode
from cfdiag.oracle import latent_entries
from cfdiag.randomnets import random_network


@pytest.fixture
def tiny():
    """One disease, one symptom, no risks.

    P(D=1) = 0.3, P(S=0 | D=1) = 0.95 * 0.4 = 0.38, P(S=1) = 0.221.
    Small enough to check every number by hand; used as the anchor fixture
    throughout the suite.
    """
    return NoisyOrNetwork(
        diseases=(DiseaseNode("d", leak=0.7),),
        symptoms=(SymptomNode("s", leak=0.95, parents=(Edge("d", 0.4),)),),
    )


@pytest.fixture
def two_disease():
    """Two diseases sharing a symptom, plus one risk factor; hand-checkable."""
    return NoisyOrNetwork(
        risk_factors=(RiskFactor("r", 0.2),),
        diseases=(
            DiseaseNode("d1", leak=0.8, parents=(Edge("r", 0.5),)),
            DiseaseNode("d2", leak=0.6),
        ),
        symptoms=(
            SymptomNode("s1", leak=0.9, parents=(Edge("d1", 0.3), Edge("d2", 0.7))),
            SymptomNode("s2", leak=0.85, parents=(Edge("d2", 0.25),)),
        ),
    )


def small_net(rng: np.random.Generator, max_latents: int = 16) -> NoisyOrNetwork:
    """A random net small enough for literal latent enumeration."""
    while True:
        net = random_network(
            rng,
            n_risks=int(rng.integers(0, 3)),
            n_diseases=int(rng.integers(1, 3)),
            n_symptoms=int(rng.integers(1, 4)),
            risk_edge_prob=0.5,
            symptom_edge_prob=0.6,
        )
        if net.symptoms and len(latent_entries(net)) <= max_latents:
            return net


def oracle_net(rng: np.random.Generator) -> NoisyOrNetwork:
    """A random net in the size band the factored oracle sweeps use."""
    return random_network(
        rng,
        n_risks=int(rng.integers(0, 4)),
        n_diseases=int(rng.integers(1, 5)),
        n_symptoms=int(rng.integers(1, 6)),
        risk_edge_prob=0.5,
        symptom_edge_prob=0.6,
    )
