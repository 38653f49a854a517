# betadyne test suites
