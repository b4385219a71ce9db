"""Monthly retweet-network polarization analysis toolkit."""

__version__ = "0.1.0"
