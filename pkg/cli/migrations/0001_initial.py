# Generated by Django 5.2.8 on 2026-10-18 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='RunReport',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(choices=[('means', 'Operator means'), ('divergence', 'Rényi and Hoeffding divergences'), ('bounds', 'Error-exponent bounds'), ('membership', 'Membership certification'), ('channels', 'Channel means and discrimination'), ('jordan', 'Two-projection normal form'), ('appendix-a', 'Commuting example chain'), ('reproduce-all', 'Acceptance suites')], max_length=20)),
                ('seed', models.PositiveBigIntegerField(default=0)),
                ('status', models.CharField(choices=[('OK', 'All checks passed'), ('VIOLATION', 'Certified property violation')], default='OK', max_length=10)),
                ('schema_version', models.PositiveSmallIntegerField()),
                ('payload', models.JSONField(blank=True, default=dict)),
                ('wall_time', models.FloatField(help_text='Seconds spent computing the report.')),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ('-created_at',),
            },
        ),
    ]
