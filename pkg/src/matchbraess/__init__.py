"""FCFS dynamic matching models: product-form analysis and the Braess paradox."""
