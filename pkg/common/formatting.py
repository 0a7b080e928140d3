# 17 significant digits round-trip every double exactly.
FLOAT_FORMAT = '%.17g'
