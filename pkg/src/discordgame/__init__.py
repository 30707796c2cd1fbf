"""Behavioral quantum strategy for an imperfect-recall game, with the
correlation measures (entropy, mutual information, discord, negativity, CHSH)
of the discordant state it runs on."""

__version__ = "0.1.0"
