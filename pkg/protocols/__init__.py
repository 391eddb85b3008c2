# Gate-induction protocols package
