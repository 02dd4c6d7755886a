# Data models for specdisp
