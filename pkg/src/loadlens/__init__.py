"""loadlens: wearable-sensor load/fatigue analytics.

Turns raw acceleration and heartbeat-interval streams into post-processed
statistical features (sliding-window moments, moments-plane trajectories,
load/recovery metrics) and trains baseline/neural models that predict
activity type from them.
"""

__version__ = "0.1.0"
