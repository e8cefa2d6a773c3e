# Test harness package
