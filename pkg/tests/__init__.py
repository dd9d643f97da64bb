# Tests package for Farey third gaps
