"""Application entry point.

Development: python run.py
Production: gunicorn -w 4 -b 0.0.0.0:5000 run:app

"""

import os

from kernel_duality import create_app


app = create_app(os.environ.get('KERNEL_DUALITY_ENV'))


if __name__ == '__main__':
    app.run(host='0.0.0.0', port=int(os.environ.get('PORT', 5000)))
