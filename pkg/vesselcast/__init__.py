"""
Vesselcast - vessel position prediction from AIS trajectories.

Cleans raw AIS position reports into fixed-rate trips, extracts kinematic
features and fits gradient-boosted regression trees that predict where a
vessel will be 10 to 60 minutes ahead.
"""

__version__ = "1.0.0"
