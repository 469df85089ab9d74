"""Contract-design REST API server (optional module).

Install: pip install twincontract[server]
Run:     uvicorn twincontract.server.app:app --reload
"""
