# Tests package






